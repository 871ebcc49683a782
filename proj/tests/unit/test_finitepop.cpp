#include "doctest.h"
#include "fixtures.hpp"
#include "rdsdiag/error.hpp"
#include "rdsdiag/finitepop.hpp"

using namespace rdsdiag;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

std::vector<Respondent> chain(int n, int degree) {
  std::vector<fx::Row> rows{{"S", "", degree}};
  for (int i = 1; i < n; ++i) rows.push_back({"r" + std::to_string(i), rows.back().id, degree});
  return fx::respondents(rows);
}

void attempts(Respondent& r, std::optional<int> k) {
  if (!r.followup) r.followup = FollowUpRecord{};
  r.followup->n_failed_attempts = k;
}

void known(Respondent& r, int k) {
  if (!r.followup) r.followup = FollowUpRecord{};
  r.followup->n_known_participants = k;
}

}  // namespace

TEST_CASE("attainment") {
  auto rs = chain(243, 1);
  CHECK(attainment_indicator(fx::from_respondents(rs, 300)));
  CHECK_FALSE(attainment_indicator(fx::from_respondents(rs, 243)));
  CHECK(code_of([&] { attainment_indicator(fx::from_respondents(rs)); }) == ErrorCode::MissingTarget);
}

TEST_CASE("failed attempts") {
  auto rs = chain(12, 3);
  for (int i = 0; i < 10; ++i) attempts(rs[static_cast<std::size_t>(i)], 0);
  const auto zero = failed_attempts_indicator(fx::from_respondents(rs));
  CHECK(zero.percent == 0.0);
  CHECK_FALSE(zero.flagged);

  attempts(rs[1], 1);
  attempts(rs[4], 2);
  attempts(rs[7], 6);
  const auto some = failed_attempts_indicator(fx::from_respondents(rs));
  CHECK(some.answered == 10);
  CHECK(some.percent == doctest::Approx(30.0));
  CHECK(some.flagged);
  CHECK(some.bands == std::array<std::size_t, 3>{7, 2, 1});
  CHECK_FALSE(failed_attempts_indicator(fx::from_respondents(rs), 1.0).flagged);

  // respondents without follow-up do not move the denominator
  auto more = rs;
  for (int i = 0; i < 5; ++i) more.push_back(fx::respondents({{"x" + std::to_string(i), ""}})[0]);
  for (std::size_t i = 12; i < more.size(); ++i) more[i].interview_order = static_cast<int>(i) + 1;
  CHECK(failed_attempts_indicator(fx::from_respondents(more)).percent == some.percent);

  auto all = chain(3, 2);
  for (auto& r : all) attempts(r, 1);
  CHECK(failed_attempts_indicator(fx::from_respondents(all), 1.0).flagged);
  CHECK(code_of([&] { failed_attempts_indicator(fx::from_respondents(chain(3, 2))); }) == ErrorCode::NoData);
}

TEST_CASE("participants known trend") {
  auto rs = chain(4, 11);
  for (int i = 0; i < 4; ++i) known(rs[static_cast<std::size_t>(i)], i + 1);
  const auto ds = fx::from_respondents(rs);
  const auto t = participants_known_trend(ds, RecruitmentForest::build(ds));
  // proportions 1/11 .. 4/11 against orders 1..4
  CHECK(t.slope == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
  CHECK(t.flagged);

  auto tenths = chain(4, 10);
  for (int i = 0; i < 4; ++i) known(tenths[static_cast<std::size_t>(i)], i + 1);
  const auto td = fx::from_respondents(tenths);
  CHECK(participants_known_trend(td, RecruitmentForest::build(td)).slope == doctest::Approx(0.1).epsilon(1e-12));

  auto flat = chain(5, 6);
  for (auto& r : flat) known(r, 2);
  const auto fd = fx::from_respondents(flat);
  const auto ft = participants_known_trend(fd, RecruitmentForest::build(fd));
  CHECK(ft.slope == 0.0);
  CHECK_FALSE(ft.flagged);

  auto zero = chain(4, 0);
  for (auto& r : zero) known(r, 1);
  const auto zd = fx::from_respondents(zero);
  CHECK(code_of([&] { participants_known_trend(zd, RecruitmentForest::build(zd)); }) ==
        ErrorCode::InsufficientData);
}

TEST_CASE("known-participant proportions stay below one after truncation") {
  auto rs = chain(30, 1);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const int age = 1 + static_cast<int>(i % 7);
    rs[i].degree.age = rs[i].degree.know = rs[i].degree.province = age;
    known(rs[i], static_cast<int>(i % 11));
  }
  const auto ds = fx::from_respondents(rs);
  const auto t = participants_known_trend(ds, RecruitmentForest::build(ds));
  CHECK(t.truncations > 0);
  for (const auto& p : t.points) {
    CHECK(p.proportion >= 0.0);
    CHECK(p.proportion < 1.0);
  }
}

TEST_CASE("indicator summary and grid") {
  auto rs = chain(6, 5);
  for (auto& r : rs) {
    attempts(r, 0);
    known(r, 1);
  }
  const auto ok = fx::from_respondents(rs, 6);
  const auto s = indicator_summary(ok, RecruitmentForest::build(ok));
  CHECK(s.attainment_failed == std::optional<bool>(false));
  CHECK(s.failed_attempts_flag == std::optional<bool>(false));
  CHECK(s.participants_known_trend_flag == std::optional<bool>(false));
  CHECK(indicator_grid_csv({s}) == "site,attainment_failed,failed_attempts,participants_known_trend\nfixture,,,\n");

  const auto no_target = fx::from_respondents(rs);
  const auto m = indicator_summary(no_target, RecruitmentForest::build(no_target));
  CHECK_FALSE(m.attainment_failed);
  CHECK(m.notes.size() == 1);
  CHECK(indicator_grid_csv({m}).find(std::string(",") + kNotEvaluableCell + ",") != std::string::npos);
}
