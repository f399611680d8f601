#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "fcikit/bootstrap.hpp"
#include "fcikit/citest.hpp"
#include "fcikit/error.hpp"
#include "fcikit/dataset.hpp"
#include "fcikit/fci.hpp"
#include "fcikit/pipeline.hpp"
#include "fcikit/sem.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fcikit::Error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fcikit::Error("cannot write file: " + path);
    out << content;
}

void apply_thread_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("FCIKIT_THREADS")) {
        const int threads = std::atoi(env);
        if (threads > 0) omp_set_num_threads(threads);
    }
#endif
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    return json::parse(read_file(path));
}

// config file fills in options the command line left untouched
template <typename T>
void config_fill(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
    if (opt != nullptr && opt->count() == 0 && cfg.contains(key))
        value = cfg.at(key).get<T>();
}

std::vector<std::string> parse_exogenous(const std::string& arg,
                                         const std::vector<std::string>& names) {
    if (arg == "none") return {};
    std::vector<std::string> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (std::find(names.begin(), names.end(), item) == names.end())
            throw fcikit::Error("exogenous variable not in dataset: " + item);
        out.push_back(item);
    }
    return out;
}

// Age and Education are exogenous by default, when present.
std::vector<std::string> default_exogenous(const std::vector<std::string>& names) {
    std::vector<std::string> out;
    for (const std::string& cand : {"Age", "Education"})
        if (std::find(names.begin(), names.end(), cand) != names.end())
            out.push_back(cand);
    return out;
}

struct EncodeArgs {
    std::string input, rules, key, output, standardize = "global", config;
};

int cmd_encode(const EncodeArgs& args) {
    const fcikit::RawTable raw = fcikit::RawTable::from_csv_file(args.input);
    const fcikit::EncodingRules rules = args.rules.empty()
                                            ? fcikit::default_encoding_rules()
                                            : fcikit::rules_from_json_file(args.rules);
    fcikit::AnswerKey key;
    const bool have_key = !args.key.empty();
    if (have_key) key = fcikit::key_from_json_file(args.key);

    const fcikit::Dataset encoded =
        fcikit::encode_survey(raw, rules, have_key ? &key : nullptr);
    fcikit::DropResult dropped = fcikit::drop_missing(encoded);

    std::vector<std::string> continuous;
    for (const auto& rule : rules.variables)
        if (rule.kind != fcikit::RuleKind::Dummy) continuous.push_back(rule.name);

    fcikit::Dataset prepared = args.standardize == "global"
                                   ? fcikit::standardize(dropped.data, continuous)
                                   : dropped.data;
    auto groups = fcikit::partition_groups(prepared);
    if (args.standardize == "per-group") {
        for (auto& [group_key, group_data] : groups) {
            std::vector<std::string> cols;
            for (const auto& name : continuous)
                if (group_data.index_of(name) >= 0) cols.push_back(name);
            group_data = fcikit::standardize(group_data, cols);
        }
    }

    fs::create_directories(args.output);
    prepared.write_csv_file((fs::path(args.output) / "encoded.csv").string());

    json sizes = json::object();
    for (int g = 1; g <= 8; ++g) sizes[std::to_string(g)] = 0;
    for (const auto& [group_key, group_data] : groups) {
        sizes[std::to_string(group_key.group_number())] = group_data.rows();
        const std::string file = "group" + std::to_string(group_key.group_number()) + ".csv";
        group_data.write_csv_file((fs::path(args.output) / file).string());
    }

    json report;
    report["total_rows"] = encoded.rows();
    report["rows_kept"] = dropped.kept;
    report["rows_dropped"] = dropped.dropped;
    report["standardize"] = args.standardize;
    report["group_sizes"] = sizes;
    write_file((fs::path(args.output) / "encode_report.json").string(),
               report.dump(2) + "\n");

    std::cerr << "encoded " << encoded.rows() << " rows, kept " << dropped.kept
              << ", dropped " << dropped.dropped << ", wrote " << groups.size()
              << " group files to " << args.output << "\n";
    return 0;
}

struct DiscoverArgs {
    std::string input, output, format = "dot", exogenous, config;
    bool oracle = false;
    double alpha = 0.05;
    int depth = -1;
};

int cmd_discover(const DiscoverArgs& args) {
    fcikit::FciOptions opts;
    opts.alpha = args.alpha;
    opts.max_depth = args.depth;

    std::unique_ptr<fcikit::CiTester> tester;
    std::vector<std::string> names;
    if (args.oracle) {
        const fcikit::SemModel model = fcikit::sem_from_json(read_file(args.input));
        names = model.observed_names();
        tester = std::make_unique<fcikit::OracleTester>(model.dag);
    } else {
        const fcikit::Dataset data = fcikit::Dataset::from_csv_file(args.input);
        if (data.has_missing())
            throw fcikit::Error("input has missing values; run encode first");
        names = data.names();
        tester = std::make_unique<fcikit::FisherZTester>(data, opts.alpha);
    }

    const auto exo = args.exogenous.empty() ? default_exogenous(names)
                                            : parse_exogenous(args.exogenous, names);
    const auto bk = fcikit::BackgroundKnowledge::from_names(names, exo);

    const fcikit::FciRun run = fcikit::fci(*tester, names, opts, bk);

    if (args.format == "dot")
        write_file(args.output, fcikit::to_dot(run.pag));
    else if (args.format == "json")
        write_file(args.output, fcikit::to_json(run.pag));
    else
        throw fcikit::Error("unknown discover format: " + args.format);
    write_file(args.output + ".report.json", fcikit::fci_report_json(run, opts, bk));

    std::cerr << "discover: " << run.pag.edge_count() << " edges, " << run.log.tests
              << " tests, report at " << args.output << ".report.json\n";
    return 0;
}

struct BootstrapArgs {
    std::string input, output, exogenous, config;
    int replicates = 100;
    std::uint64_t seed = 1;
    double min_prob = 0.2;
    double alpha = 0.05;
    int depth = -1;
};

int cmd_bootstrap(const BootstrapArgs& args) {
    const fcikit::Dataset data = fcikit::Dataset::from_csv_file(args.input);
    if (data.has_missing())
        throw fcikit::Error("input has missing values; run encode first");

    fcikit::FciOptions opts;
    opts.alpha = args.alpha;
    opts.max_depth = args.depth;
    const auto exo = args.exogenous.empty() ? default_exogenous(data.names())
                                            : parse_exogenous(args.exogenous, data.names());
    const auto bk = fcikit::BackgroundKnowledge::from_names(data.names(), exo);

    const fcikit::BootstrapTable table =
        fcikit::bootstrap_fci(data, data.names(), opts, bk, args.replicates, args.seed);
    const fcikit::BootstrapTable kept = fcikit::filter_table(table, args.min_prob);
    write_file(args.output, fcikit::bootstrap_table_csv(kept));

    json report;
    report["replicates"] = args.replicates;
    report["seed"] = args.seed;
    report["alpha"] = args.alpha;
    report["min_prob"] = args.min_prob;
    report["edges_total"] = table.entries.size();
    report["edges_kept"] = kept.entries.size();
    std::vector<std::string> exo_names = exo;
    report["exogenous"] = exo_names;
    write_file(args.output + ".report.json", report.dump(2) + "\n");

    std::cerr << "bootstrap: " << args.replicates << " replicates, kept "
              << kept.entries.size() << "/" << table.entries.size()
              << " edges above " << args.min_prob << "\n";
    return 0;
}

struct SimulateArgs {
    std::string output, config;
    int nodes = 4;
    int latent = 0;
    double degree = 2.0;
    int samples = 1000;
    std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateArgs& args) {
    if (args.samples < 1) throw fcikit::Error("samples must be >= 1");
    const fcikit::SemModel model =
        fcikit::random_sem(args.nodes, args.latent, args.degree, args.seed);
    const fcikit::Dataset data = fcikit::sample(model, args.samples, args.seed + 1);
    write_file(args.output + ".model.json", fcikit::sem_to_json(model));
    data.write_csv_file(args.output + ".data.csv");
    std::cerr << "simulate: wrote " << args.output << ".model.json and "
              << args.output << ".data.csv\n";
    return 0;
}

struct SummaryArgs {
    std::string input, output, column = "Fin_Literacy", config;
};

int cmd_summary(const SummaryArgs& args) {
    const fcikit::Dataset data = fcikit::Dataset::from_csv_file(args.input);
    const auto groups = fcikit::partition_groups(data);
    const auto summaries = fcikit::group_summary(groups, args.column);
    write_file(args.output, fcikit::group_summary_csv(summaries, args.column));
    std::cerr << "summary: " << summaries.size() << " groups for " << args.column << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_env();

    CLI::App app{"FCI causal discovery toolkit for encoded survey data"};
    app.require_subcommand(1);

    EncodeArgs enc;
    auto* enc_cmd = app.add_subcommand("encode", "Encode a raw survey CSV into analysis groups");
    enc_cmd->add_option("--input", enc.input, "raw survey CSV")->required();
    enc_cmd->add_option("--rules", enc.rules, "encoding rules JSON (built-in defaults otherwise)");
    enc_cmd->add_option("--key", enc.key, "answer key JSON for the literacy score");
    enc_cmd->add_option("--output", enc.output, "output directory")->required();
    enc_cmd->add_option("--standardize", enc.standardize, "global|per-group|none")
        ->check(CLI::IsMember({"global", "per-group", "none"}));
    enc_cmd->add_option("--config", enc.config, "config JSON (flags override it)");

    DiscoverArgs dis;
    auto* dis_cmd = app.add_subcommand("discover", "Run FCI on one encoded group");
    dis_cmd->add_option("--input", dis.input, "encoded CSV, or model JSON with --oracle")->required();
    dis_cmd->add_flag("--oracle", dis.oracle, "input is a simulated model; use the exact d-separation tester");
    auto* dis_alpha = dis_cmd->add_option("--alpha", dis.alpha, "significance level");
    auto* dis_depth = dis_cmd->add_option("--depth", dis.depth, "max conditioning size, -1 = unlimited");
    dis_cmd->add_option("--exogenous", dis.exogenous, "comma list or 'none' (default: Age,Education when present)");
    auto* dis_format = dis_cmd->add_option("--format", dis.format, "dot|json");
    dis_cmd->add_option("--output", dis.output, "output graph file")->required();
    dis_cmd->add_option("--config", dis.config, "config JSON (flags override it)");

    BootstrapArgs boot;
    auto* boot_cmd = app.add_subcommand("bootstrap", "Bootstrap edge probabilities for one group");
    boot_cmd->add_option("--input", boot.input, "encoded CSV")->required();
    auto* boot_b = boot_cmd->add_option("--bootstrap", boot.replicates, "number of replicates");
    auto* boot_seed = boot_cmd->add_option("--seed", boot.seed, "base seed");
    auto* boot_min = boot_cmd->add_option("--min-prob", boot.min_prob, "retain edges with probability strictly greater");
    auto* boot_alpha = boot_cmd->add_option("--alpha", boot.alpha, "significance level");
    auto* boot_depth = boot_cmd->add_option("--depth", boot.depth, "max conditioning size");
    boot_cmd->add_option("--exogenous", boot.exogenous, "comma list or 'none'");
    boot_cmd->add_option("--output", boot.output, "edge table CSV")->required();
    boot_cmd->add_option("--config", boot.config, "config JSON (flags override it)");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Sample a random linear-Gaussian model");
    sim_cmd->add_option("--nodes", sim.nodes, "observed node count")->required();
    sim_cmd->add_option("--latent", sim.latent, "latent confounder count");
    sim_cmd->add_option("--degree", sim.degree, "expected degree");
    sim_cmd->add_option("--samples", sim.samples, "row count")->required();
    sim_cmd->add_option("--seed", sim.seed, "seed");
    sim_cmd->add_option("--output", sim.output, "output prefix")->required();
    sim_cmd->add_option("--config", sim.config, "config JSON (flags override it)");

    SummaryArgs sum;
    auto* sum_cmd = app.add_subcommand("summary", "Per-group distribution summary of one column");
    sum_cmd->add_option("--input", sum.input, "encoded CSV with dummy columns")->required();
    sum_cmd->add_option("--column", sum.column, "column to summarize");
    sum_cmd->add_option("--output", sum.output, "summary CSV")->required();
    sum_cmd->add_option("--config", sum.config, "config JSON (flags override it)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (enc_cmd->parsed()) {
            return cmd_encode(enc);
        }
        if (dis_cmd->parsed()) {
            const json cfg = load_config(dis.config);
            config_fill(dis_alpha, cfg, "alpha", dis.alpha);
            config_fill(dis_depth, cfg, "depth", dis.depth);
            config_fill(dis_format, cfg, "format", dis.format);
            return cmd_discover(dis);
        }
        if (boot_cmd->parsed()) {
            const json cfg = load_config(boot.config);
            config_fill(boot_b, cfg, "bootstrap", boot.replicates);
            config_fill(boot_seed, cfg, "seed", boot.seed);
            config_fill(boot_min, cfg, "min_prob", boot.min_prob);
            config_fill(boot_alpha, cfg, "alpha", boot.alpha);
            config_fill(boot_depth, cfg, "depth", boot.depth);
            return cmd_bootstrap(boot);
        }
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (sum_cmd->parsed()) return cmd_summary(sum);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
