#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdsdiag/dataset.hpp"

namespace fx {

using rdsdiag::Respondent;
using rdsdiag::StudyDataset;

// One row of a hand-written study: parent is empty for seeds. The coupon a
// recruit redeems is named "c-<id>" and issued by the parent.
struct Row {
  std::string id;
  std::string parent;
  std::optional<int> degree = 1;
  std::optional<bool> trait = false;
};

inline rdsdiag::TraitSpec binary_trait(const std::string& name = "t") {
  return {name, rdsdiag::TraitKind::Binary, "yes"};
}

inline std::optional<std::string> yes_no(std::optional<bool> v) {
  if (!v) return std::nullopt;
  return std::string(*v ? "yes" : "no");
}

// Rows become respondents in listed order; every degree question gets the
// same answer.
inline std::vector<Respondent> respondents(const std::vector<Row>& rows) {
  std::vector<Respondent> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    Respondent r;
    r.id = row.id;
    if (!row.parent.empty()) r.coupon_in = "c-" + row.id;
    r.interview_order = static_cast<int>(i) + 1;
    r.degree.know = row.degree;
    r.degree.province = row.degree;
    r.degree.age = row.degree;
    r.degree.seen_week = row.degree;
    r.traits.push_back(yes_no(row.trait));
    out.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].parent.empty()) continue;
    for (auto& p : out) {
      if (p.id == rows[i].parent) p.coupons_out.push_back("c-" + rows[i].id);
    }
  }
  return out;
}

inline StudyDataset dataset(const std::vector<Row>& rows, std::optional<int> target = std::nullopt,
                            int allotment = 3) {
  return StudyDataset("fixture", target, {binary_trait()}, respondents(rows), allotment);
}

inline StudyDataset from_respondents(std::vector<Respondent> rs, std::optional<int> target = std::nullopt,
                            int allotment = 3) {
  return StudyDataset("fixture", target, {binary_trait()}, std::move(rs), allotment);
}

// Seed S with recruits R1 and R2 via coupons C1 and C2.
inline const char* kThreeRespondents =
    "id,coupon_in,coupon_out_1,coupon_out_2,coupon_out_3,interview_order,interview_date,"
    "deg_know,deg_province,deg_age,deg_week,reach_day,reach_week,receive_week,motivation,employed,"
    "trait:hiv\n"
    "S,,C1,C2,,1,2024-01-02,20,15,10,8,3,6,5,money,yes,yes\n"
    "R1,C1,,,,2,2024-01-03,12,10,6,4,2,4,4,help,no,no\n"
    "R2,C2,,,,3,2024-01-05,9,9,5,5,1,5,3,money,yes,no\n";

inline const char* kThreeFollowup =
    "id,fu_deg_know,fu_deg_province,fu_deg_age,fu_deg_week,fu_reach_day,fu_reach_week,"
    "fu_receive_week,n_failed_attempts,n_known_participants,n_coupons_distributed,n_refusals,"
    "refusal_reason_1,refusal_reason_2,refusal_reason_3,refusal_reason_4,refusal_reason_5,"
    "n_contacts_employed,coupon_id_1,days_1,recip_1,recipient_employed_1,coupon_id_2,days_2,"
    "recip_2,recipient_employed_2,coupon_id_3,days_3,recip_3,recipient_employed_3\n"
    "S,18,14,10,7,3,6,5,1,8,2,1,Not interested,,,,,4,C1,1,yes,no,C2,3,yes,yes,,,,\n"
    "R1,12,10,6,5,2,4,4,0,2,0,0,,,,,,3,,,,,,,,,,,,\n";

inline const char* kHivTraits = "name,kind,reference_level\nhiv,binary,yes\n";

}  // namespace fx
