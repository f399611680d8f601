#include "fcikit/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "fcikit/error.hpp"

namespace fcikit {

namespace {

const char* kind_name(RuleKind k) {
    switch (k) {
        case RuleKind::Dummy: return "dummy";
        case RuleKind::MidpointMap: return "midpoint-map";
        case RuleKind::YearsMap: return "years-map";
        case RuleKind::Likert: return "likert";
        case RuleKind::Count: return "count";
        case RuleKind::Composite: return "composite";
    }
    throw Error("unreachable rule kind");
}

RuleKind kind_from_name(const std::string& s) {
    if (s == "dummy") return RuleKind::Dummy;
    if (s == "midpoint-map") return RuleKind::MidpointMap;
    if (s == "years-map") return RuleKind::YearsMap;
    if (s == "likert") return RuleKind::Likert;
    if (s == "count") return RuleKind::Count;
    if (s == "composite") return RuleKind::Composite;
    throw Error("unknown rule kind: " + s);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

RawTable RawTable::from_csv(std::istream& in) {
    RawTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error("RawTable: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.headers = csv_split_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = csv_split_line(line);
        if (cells.size() != t.headers.size())
            throw Error("RawTable: row " + std::to_string(t.rows.size() + 1) +
                        " has wrong cell count");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

RawTable RawTable::from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    return from_csv(in);
}

int RawTable::column(const std::string& header) const {
    auto it = std::find(headers.begin(), headers.end(), header);
    return it == headers.end() ? -1 : static_cast<int>(it - headers.begin());
}

EncodingRules default_encoding_rules() {
    EncodingRules rules;
    auto add = [&](EncodingRule r) { rules.variables.push_back(std::move(r)); };

    EncodingRule male;
    male.name = "Male";
    male.kind = RuleKind::Dummy;
    male.question = "Q42";
    male.one_when = {"1", "Male"};
    add(male);

    EncodingRule fin_edu;
    fin_edu.name = "Fin_Edu";
    fin_edu.kind = RuleKind::Dummy;
    fin_edu.question = "Q39";
    fin_edu.one_when = {"1", "Yes, and I did participate in the financial education."};
    add(fin_edu);

    EncodingRule fin_edu_home;
    fin_edu_home.name = "Fin_Edu_Home";
    fin_edu_home.kind = RuleKind::Dummy;
    fin_edu_home.question = "Q40";
    fin_edu_home.one_when = {"1", "Yes"};
    add(fin_edu_home);

    EncodingRule age;
    age.name = "Age";
    age.kind = RuleKind::MidpointMap;
    age.question = "Q43";
    age.mapping = {{"1", 18.5}, {"2", 22}, {"3", 27}, {"4", 32}, {"5", 37},
                   {"6", 42},   {"7", 47}, {"8", 52}, {"9", 57}, {"10", 62},
                   {"11", 67},  {"12", 72}, {"13", 77}};
    add(age);

    EncodingRule edu;
    edu.name = "Education";
    edu.kind = RuleKind::YearsMap;
    edu.question = "Q44";
    edu.mapping = {{"Primary and secondary schools only", 9},
                   {"High school", 12},
                   {"Vocational school", 14},
                   {"Junior college or technical college", 14},
                   {"University", 16},
                   {"Graduate school", 18}};
    edu.missing_codes = {"Other"};
    add(edu);

    EncodingRule income;
    income.name = "Income";
    income.kind = RuleKind::MidpointMap;
    income.question = "Q51";
    income.mapping = {{"Don't have any financial assets", 0},
                      {"Less than 2.5 million yen", 125},
                      {"At least 2.5 million but less than 5 million yen", 375},
                      {"At least 5 million but less than 7.5 million yen", 625},
                      {"At least 7.5 million but less than 10 million yen", 875},
                      {"At least 10 million but less than 15 million yen", 1250},
                      {"At least 15 million yen", 1500}};
    income.missing_codes = {"Don't know/Prefer not to say"};
    add(income);

    EncodingRule assets;
    assets.name = "Asset_Amt";
    assets.kind = RuleKind::MidpointMap;
    assets.question = "Q52";
    assets.mapping = {{"Don't have any financial assets", 0},
                      {"Less than 2.5 million yen", 125},
                      {"At least 2.5 million but less than 5 million yen", 375},
                      {"At least 5 million but less than 7.5 million yen", 625},
                      {"At least 7.5 million but less than 10 million yen", 875},
                      {"At least 10 million but less than 20 million yen", 1500},
                      {"At least 20 million yen", 2000}};
    assets.missing_codes = {"Don't know/Prefer not to say"};
    add(assets);

    EncodingRule myopic;
    myopic.name = "Myopic_Bias";
    myopic.kind = RuleKind::Likert;
    myopic.question = "Q1_10";
    add(myopic);

    EncodingRule herding;
    herding.name = "Herding_Bias";
    herding.kind = RuleKind::Likert;
    herding.question = "Q1_3";
    add(herding);

    EncodingRule confidence;
    confidence.name = "Confidence";
    confidence.kind = RuleKind::Likert;
    confidence.question = "Q17";
    confidence.missing_codes = {"6"};
    add(confidence);

    EncodingRule invest;
    invest.name = "Invest";
    invest.kind = RuleKind::Count;
    invest.questions = {"Q34_1", "Q34_2", "Q34_3"};  // stocks, trusts, FX deposits/MMF
    invest.one_when = {"1"};
    add(invest);

    EncodingRule planning;
    planning.name = "Planning";
    planning.kind = RuleKind::Count;
    planning.questions = {"Q7_1", "Q8_1", "Q9_1", "Q10_1"};
    planning.one_when = {"1"};
    add(planning);

    EncodingRule literacy;
    literacy.name = "Fin_Literacy";
    literacy.kind = RuleKind::Composite;
    literacy.questions = {"Q4",    "Q5",    "Q12",   "Q13",   "Q14",   "Q15",  "Q16",
                          "Q18",   "Q19",   "Q20",   "Q21_1", "Q21_2", "Q21_3",
                          "Q21_4", "Q22",   "Q23",   "Q25",   "Q26",   "Q28",
                          "Q30",   "Q31",   "Q33",   "Q36",   "Q37",   "Q38"};
    add(literacy);

    return rules;
}

std::string rules_to_json(const EncodingRules& rules) {
    nlohmann::json j;
    j["variables"] = nlohmann::json::array();
    for (const auto& r : rules.variables) {
        nlohmann::json v;
        v["name"] = r.name;
        v["kind"] = kind_name(r.kind);
        if (!r.question.empty()) v["question"] = r.question;
        if (!r.questions.empty()) v["questions"] = r.questions;
        if (!r.mapping.empty()) {
            nlohmann::json m = nlohmann::json::object();
            for (const auto& [code, value] : r.mapping) m[code] = value;
            v["mapping"] = m;
        }
        if (!r.missing_codes.empty())
            v["missing"] = std::vector<std::string>(r.missing_codes.begin(),
                                                    r.missing_codes.end());
        if (!r.one_when.empty()) v["one_when"] = r.one_when;
        if (r.kind == RuleKind::Likert) {
            v["min"] = r.likert_min;
            v["max"] = r.likert_max;
        }
        j["variables"].push_back(v);
    }
    return j.dump(2) + "\n";
}

EncodingRules rules_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    EncodingRules rules;
    for (const auto& v : j.at("variables")) {
        EncodingRule r;
        r.name = v.at("name").get<std::string>();
        r.kind = kind_from_name(v.at("kind").get<std::string>());
        if (v.contains("question")) r.question = v.at("question").get<std::string>();
        if (v.contains("questions"))
            r.questions = v.at("questions").get<std::vector<std::string>>();
        if (v.contains("mapping"))
            for (const auto& [code, value] : v.at("mapping").items())
                r.mapping[code] = value.get<double>();
        if (v.contains("missing"))
            for (const auto& code : v.at("missing").get<std::vector<std::string>>())
                r.missing_codes.insert(code);
        if (v.contains("one_when"))
            r.one_when = v.at("one_when").get<std::vector<std::string>>();
        if (v.contains("min")) r.likert_min = v.at("min").get<int>();
        if (v.contains("max")) r.likert_max = v.at("max").get<int>();
        rules.variables.push_back(std::move(r));
    }
    return rules;
}

EncodingRules rules_from_json_file(const std::string& path) {
    return rules_from_json(read_file(path));
}

AnswerKey key_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    AnswerKey key;
    for (const auto& [question, answer] : j.items())
        key.correct[question] = answer.get<std::string>();
    return key;
}

AnswerKey key_from_json_file(const std::string& path) {
    return key_from_json(read_file(path));
}

namespace {

struct Encoded {
    double value = 0.0;
    bool missing = false;
};

Encoded encode_cell(const EncodingRule& rule, const std::string& cell) {
    if (cell.empty()) return {0.0, true};
    if (rule.missing_codes.count(cell)) return {0.0, true};
    switch (rule.kind) {
        case RuleKind::Dummy:
            return {std::find(rule.one_when.begin(), rule.one_when.end(), cell) !=
                            rule.one_when.end()
                        ? 1.0
                        : 0.0,
                    false};
        case RuleKind::MidpointMap:
        case RuleKind::YearsMap: {
            auto it = rule.mapping.find(cell);
            if (it == rule.mapping.end()) throw UnknownAnswerCodeError(rule.question, cell);
            return {it->second, false};
        }
        case RuleKind::Likert: {
            int v = 0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() ||
                v < rule.likert_min || v > rule.likert_max)
                throw UnknownAnswerCodeError(rule.question, cell);
            return {static_cast<double>(v), false};
        }
        default:
            throw Error("encode_cell: kind handled elsewhere");
    }
}

}  // namespace

Dataset encode_survey(const RawTable& raw, const EncodingRules& rules,
                      const AnswerKey* key) {
    // resolve raw column positions up front
    std::vector<std::vector<int>> rule_columns(rules.variables.size());
    for (std::size_t i = 0; i < rules.variables.size(); ++i) {
        const auto& rule = rules.variables[i];
        const auto sources = rule.questions.empty()
                                 ? std::vector<std::string>{rule.question}
                                 : rule.questions;
        for (const auto& q : sources) {
            const int col = raw.column(q);
            if (col < 0) throw MissingRuleError(q);
            rule_columns[i].push_back(col);
        }
        if (rule.kind == RuleKind::Composite) {
            if (key == nullptr)
                throw Error("encode_survey: composite rule '" + rule.name +
                            "' requires an answer key");
            for (const auto& q : rule.questions)
                if (key->correct.count(q) == 0)
                    throw Error("encode_survey: answer key has no entry for " + q);
        }
    }

    std::vector<std::string> names;
    for (const auto& rule : rules.variables) names.push_back(rule.name);
    Dataset out(names, static_cast<int>(raw.rows.size()));

    for (std::size_t row = 0; row < raw.rows.size(); ++row) {
        const auto& cells = raw.rows[row];
        for (std::size_t i = 0; i < rules.variables.size(); ++i) {
            const auto& rule = rules.variables[i];
            const auto& cols = rule_columns[i];
            switch (rule.kind) {
                case RuleKind::Count: {
                    double total = 0.0;
                    for (int col : cols)
                        if (std::find(rule.one_when.begin(), rule.one_when.end(),
                                      cells[col]) != rule.one_when.end())
                            total += 1.0;
                    out.set(static_cast<int>(row), static_cast<int>(i), total);
                    break;
                }
                case RuleKind::Composite: {
                    double score = 0.0;
                    for (std::size_t q = 0; q < rule.questions.size(); ++q)
                        if (cells[cols[q]] == key->correct.at(rule.questions[q]))
                            score += 1.0;
                    out.set(static_cast<int>(row), static_cast<int>(i), score);
                    break;
                }
                default: {
                    const Encoded enc = encode_cell(rule, cells[cols[0]]);
                    if (enc.missing)
                        out.set_missing(static_cast<int>(row), static_cast<int>(i));
                    else
                        out.set(static_cast<int>(row), static_cast<int>(i), enc.value);
                }
            }
        }
    }
    return out;
}

DropResult drop_missing(const Dataset& data) {
    std::vector<int> keep;
    for (int r = 0; r < data.rows(); ++r)
        if (!data.row_has_missing(r)) keep.push_back(r);
    if (keep.empty()) throw EmptyResultError("drop_missing: all rows removed");
    DropResult res{data.select_rows(keep), static_cast<int>(keep.size()),
                   data.rows() - static_cast<int>(keep.size())};
    return res;
}

Dataset standardize(const Dataset& data, const std::vector<std::string>& continuous) {
    Dataset out = data;
    for (const auto& name : continuous) {
        const int c = data.index_of(name);
        if (c < 0) throw Error("standardize: no such column: " + name);
        const int n = data.rows();
        double mean = 0.0;
        for (int r = 0; r < n; ++r) mean += data.at(r, c);
        mean /= n;
        double ss = 0.0;
        for (int r = 0; r < n; ++r) ss += (data.at(r, c) - mean) * (data.at(r, c) - mean);
        const double sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        if (sd == 0.0) throw ConstantColumnError(name);
        for (int r = 0; r < n; ++r) out.set(r, c, (data.at(r, c) - mean) / sd);
    }
    return out;
}

int GroupKey::group_number() const {
    return 1 + 4 * (1 - male) + 2 * (1 - fin_edu_home) + (1 - fin_edu);
}

std::map<GroupKey, Dataset> partition_groups(const Dataset& data) {
    const std::vector<std::string> dummies = {"Male", "Fin_Edu", "Fin_Edu_Home"};
    std::vector<int> cols;
    for (const auto& d : dummies) {
        const int c = data.index_of(d);
        if (c < 0) throw Error("partition_groups: missing dummy column " + d);
        cols.push_back(c);
    }
    auto bit = [&](int row, int col) {
        const double v = data.at(row, col);
        if (v != 0.0 && v != 1.0) throw NonBinaryDummyError(data.names()[col], v);
        return static_cast<int>(v);
    };

    std::map<GroupKey, std::vector<int>> rows;
    for (int r = 0; r < data.rows(); ++r) {
        if (data.row_has_missing(r))
            throw Error("partition_groups: missing values present; drop them first");
        rows[GroupKey{bit(r, cols[0]), bit(r, cols[1]), bit(r, cols[2])}].push_back(r);
    }

    std::map<GroupKey, Dataset> out;
    for (const auto& [key, indices] : rows)
        out.emplace(key, data.select_rows(indices).drop_columns(dummies));
    return out;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw Error("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

std::vector<GroupSummary> group_summary(const std::map<GroupKey, Dataset>& groups,
                                        const std::string& column) {
    std::vector<GroupSummary> out;
    for (const auto& [key, data] : groups) {
        const int c = data.index_of(column);
        if (c < 0) throw Error("group_summary: no such column: " + column);
        std::vector<double> v(data.column(c), data.column(c) + data.rows());
        GroupSummary s;
        s.key = key;
        s.n = data.rows();
        s.min = *std::min_element(v.begin(), v.end());
        s.max = *std::max_element(v.begin(), v.end());
        s.q1 = quantile(v, 0.25);
        s.median = quantile(v, 0.5);
        s.q3 = quantile(v, 0.75);
        s.mean = 0.0;
        for (double x : v) s.mean += x;
        s.mean /= s.n;
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), [](const GroupSummary& a, const GroupSummary& b) {
        return a.key.group_number() < b.key.group_number();
    });
    return out;
}

std::string group_summary_csv(const std::vector<GroupSummary>& summaries,
                              const std::string& column) {
    std::string out = "group,male,fin_edu,fin_edu_home,column,n,min,q1,median,q3,max,mean\n";
    char buf[160];
    for (const auto& s : summaries) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,", s.key.group_number(), s.key.male,
                      s.key.fin_edu, s.key.fin_edu_home);
        out += buf;
        out += csv_escape(column);
        std::snprintf(buf, sizeof(buf), ",%d,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n", s.n, s.min,
                      s.q1, s.median, s.q3, s.max, s.mean);
        out += buf;
    }
    return out;
}

}  // namespace fcikit
