#ifndef FCIKIT_PIPELINE_HPP
#define FCIKIT_PIPELINE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fcikit/dataset.hpp"

namespace fcikit {

/// Raw survey table: answer codes as text, one respondent per row.
struct RawTable {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;

    static RawTable from_csv(std::istream& in);
    static RawTable from_csv_file(const std::string& path);
    int column(const std::string& header) const;  // -1 when absent
};

enum class RuleKind { Dummy, MidpointMap, YearsMap, Likert, Count, Composite };

/// One output variable's encoding. Map kinds translate a single question's
/// answer code through `mapping`; count kinds count indicator answers across
/// `questions`; composite scores `questions` against an external answer key.
struct EncodingRule {
    std::string name;
    RuleKind kind = RuleKind::MidpointMap;
    std::string question;                  // single-question kinds
    std::vector<std::string> questions;    // count / composite
    std::map<std::string, double> mapping; // map kinds: code -> value
    std::set<std::string> missing_codes;
    std::vector<std::string> one_when;     // dummy: codes mapping to 1; count: codes counted
    int likert_min = 1;
    int likert_max = 5;
};

struct EncodingRules {
    std::vector<EncodingRule> variables;
};

/// question id -> correct answer code, for composite scoring. The survey
/// provider does not publish the key, so it is always user-supplied.
struct AnswerKey {
    std::map<std::string, std::string> correct;
};

// The 13-variable encoding described by the survey codebook. Age, Income and
// Asset_Amt use bracket representatives; Education maps schooling years;
// Q17 code 6 is a missing sentinel.
EncodingRules default_encoding_rules();

std::string rules_to_json(const EncodingRules& rules);
EncodingRules rules_from_json(const std::string& text);
EncodingRules rules_from_json_file(const std::string& path);
AnswerKey key_from_json(const std::string& text);
AnswerKey key_from_json_file(const std::string& path);

// Applies every rule to every row. Composite rules require a key covering all
// of their questions. Unmapped non-empty codes are a hard error.
Dataset encode_survey(const RawTable& raw, const EncodingRules& rules,
                      const AnswerKey* key = nullptr);

struct DropResult {
    Dataset data;
    int kept = 0;
    int dropped = 0;
};

// Removes every row containing a missing value.
DropResult drop_missing(const Dataset& data);

// Rescales the listed columns to sample mean 0 and sample sd 1 (n-1).
Dataset standardize(const Dataset& data, const std::vector<std::string>& continuous);

/// One of the eight dummy-combination groups.
struct GroupKey {
    int male = 0;
    int fin_edu = 0;
    int fin_edu_home = 0;

    int group_number() const;  // 1..8, matching the published group table
    bool operator<(const GroupKey& o) const { return group_number() < o.group_number(); }
    bool operator==(const GroupKey& o) const {
        return male == o.male && fin_edu == o.fin_edu && fin_edu_home == o.fin_edu_home;
    }
};

// Disjoint partition of the rows by (Male, Fin_Edu, Fin_Edu_Home); the dummy
// columns are dropped from each group's dataset.
std::map<GroupKey, Dataset> partition_groups(const Dataset& data);

struct GroupSummary {
    GroupKey key;
    int n = 0;
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

// Per-group five-number summary plus mean; quartiles use linear interpolation.
std::vector<GroupSummary> group_summary(const std::map<GroupKey, Dataset>& groups,
                                        const std::string& column);
std::string group_summary_csv(const std::vector<GroupSummary>& summaries,
                              const std::string& column);

// Linear-interpolation quantile of a sample (exposed for the summary oracle).
double quantile(std::vector<double> values, double p);

}  // namespace fcikit

#endif
