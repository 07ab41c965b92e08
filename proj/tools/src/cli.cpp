#include "gtrx/cli.hpp"

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "gtrx/errors.hpp"

namespace gtrx::cli {

namespace {

/// Flags that override retrieval settings. Defaults shown in --help are the
/// built-in ones; a flag only wins when given explicitly.
struct RetrievalFlags {
    retrieval::RetrievalConfig defaults;
    double alpha = defaults.alpha;
    int k = defaults.k;
    int k_final = defaults.k_final;
    std::string chunker = std::string(retrieval::to_string(defaults.chunker));
    int window = defaults.window_words;
    int overlap = defaults.overlap_words;
    bool rerank = defaults.use_reranker;
    std::vector<CLI::Option*> options;  // alpha, k, k_final, chunker, window, overlap, rerank

    void add(CLI::App* sub, bool sweepable) {
        if (!sweepable) {
            options.push_back(sub->add_option("--alpha", alpha, "Hybrid weight on normalized BM25")->capture_default_str());
        } else {
            options.push_back(nullptr);
        }
        options.push_back(sub->add_option("--k", k, "Candidates kept after hybrid scoring")->capture_default_str());
        options.push_back(
            sub->add_option("--k-final", k_final, "Chunks kept after branch deduplication")->capture_default_str());
        if (!sweepable) {
            options.push_back(sub->add_option("--chunker", chunker, "hierarchical or sliding")->capture_default_str());
        } else {
            options.push_back(nullptr);
        }
        options.push_back(sub->add_option("--window", window, "Sliding window size in words")->capture_default_str());
        options.push_back(sub->add_option("--overlap", overlap, "Sliding window overlap in words")->capture_default_str());
        if (!sweepable) {
            options.push_back(sub->add_flag("--rerank,!--no-rerank", rerank, "Re-rank the top-k candidates")
                                  ->capture_default_str());
        } else {
            options.push_back(nullptr);
        }
    }

    void apply(retrieval::RetrievalConfig& c) const {
        auto given = [&](std::size_t i) { return options[i] && options[i]->count() > 0; };
        if (given(0)) c.alpha = alpha;
        if (given(1)) c.k = k;
        if (given(2)) c.k_final = k_final;
        if (given(3)) {
            const auto kind = retrieval::chunker_from_string(chunker);
            if (!kind) throw ConfigError("unknown chunker '" + chunker + "'");
            c.chunker = *kind;
        }
        if (given(4)) c.window_words = window;
        if (given(5)) c.overlap_words = overlap;
        if (given(6)) c.use_reranker = rerank;
        c.validate();
    }
};

struct ThresholdFlags {
    linking::LinkingThresholds values;
    std::vector<std::pair<CLI::Option*, double linking::LinkingThresholds::*>> options;

    void add(CLI::App* sub) {
        using T = linking::LinkingThresholds;
        const struct {
            const char* flag;
            double T::*member;
            const char* help;
        } table[] = {
            {"--opportunity-min-score", &T::opportunity_min_score, "Minimum score to link an opportunity"},
            {"--route-boost", &T::route_boost, "Added when the funding route matches"},
            {"--award-penalty", &T::award_penalty, "Subtracted when the award is outside the range"},
            {"--cluster-org-min-similarity", &T::cluster_org_min_similarity, "Organisation similarity to share a cluster"},
            {"--align-min-similarity", &T::align_min_similarity, "Organisation similarity to align a person"},
            {"--align-min-margin", &T::align_min_margin, "Lead over the runner-up to align a person"},
            {"--title-agreement-min", &T::title_agreement_min, "Title similarity counted as agreement"},
        };
        for (const auto& row : table)
            options.emplace_back(sub->add_option(row.flag, values.*row.member, row.help)->capture_default_str(),
                                 row.member);
    }

    void apply(linking::LinkingThresholds& t) const {
        for (const auto& [opt, member] : options)
            if (opt->count() > 0) t.*member = values.*member;
    }
};

void add_completion(CLI::App* sub, CompletionArgs& c) {
    sub->add_option("--replay", c.replay, "Replay fixture (JSON lines of doc_id, field, response_text)");
    sub->add_option("--endpoint", c.endpoint, "Chat-completions base URL when not replaying");
    sub->add_option("--model", c.model, "Model name when not replaying");
}

void report_error(std::ostream& err, std::string_view command, std::string_view kind, std::string_view message) {
    nlohmann::ordered_json j{{"error", {{"command", command}, {"kind", kind}, {"message", message}}}};
    err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grant metadata extraction, linking and storage tools", "gtrx"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (sections: retrieval, linking, completion)")
        ->envname("GTRX_CONFIG");

    ParseArgs parse_args;
    auto* parse = app.add_subcommand("parse", "Parse opportunity HTML into document trees");
    parse->add_option("--input", parse_args.inputs, "HTML/JSON files or directories")->required();
    parse->add_option("--out", parse_args.out_dir, "Output directory (default: JSON to stdout)");
    parse->add_flag("--markdown", parse_args.markdown, "Also write the markdown serialization");

    ExtractArgs extract_args;
    RetrievalFlags extract_flags;
    auto* extract = app.add_subcommand("extract", "Extract the six metadata fields per document");
    extract->add_option("--input", extract_args.inputs, "HTML/JSON files or directories")->required();
    add_completion(extract, extract_args.completion);
    extract->add_flag("--full-document", extract_args.full_document, "Send the whole document instead of retrieved chunks");
    extract->add_option("--output", extract_args.output, "Predictions file (JSON lines)")->capture_default_str();
    extract->add_option("--trace", extract_args.trace, "Retrieval trace file (JSON lines)");
    extract_flags.add(extract, false);

    EvalArgs eval_args;
    auto* evaluate = app.add_subcommand("eval", "Score predictions against gold annotations");
    evaluate->add_option("--gold", eval_args.gold, "Gold annotations (JSON lines)")->required();
    evaluate->add_option("--predictions", eval_args.predictions, "Predictions (JSON lines)")->required();
    evaluate->add_option("--docs", eval_args.docs, "Documents used to classify hallucination origins");
    evaluate->add_option("--output", eval_args.output, "Also write the text report here");
    evaluate->add_option("--json", eval_args.json, "Write the JSON report here");

    LinkArgs link_args;
    ThresholdFlags link_flags;
    auto* link = app.add_subcommand("link", "Link applications and panel attendance to GtR records");
    link->add_option("--applications", link_args.applications, "Applications (.jsonl or .csv)");
    link->add_option("--meetings", link_args.meetings, "Panel meetings (.jsonl or .csv)");
    link->add_option("--opportunities", link_args.opportunities, "Funding opportunities (.jsonl or .csv)");
    link->add_option("--appearances", link_args.appearances, "Panel appearances (.jsonl or .csv)");
    link->add_option("--store", link_args.store_inputs, "Store records (JSON lines files or directories)");
    link->add_option("--output", link_args.output, "Link results (JSON lines)")->capture_default_str();
    link->add_option("--clusters", link_args.clusters, "Write attendance clusters (JSON lines)");
    link->add_option("--validation", link_args.validation, "Write the cross-validation report (JSON)");
    link_flags.add(link);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "Load store records and report referential integrity");
    ingest->add_option("--input", ingest_args.inputs, "JSON lines files or directories")->required();
    ingest->add_option("--export", ingest_args.export_dir, "Export JSON lines and CSV tables here");
    ingest->add_option("--report", ingest_args.report_json, "Write the orphan report (JSON)");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Print an orphan report or re-render an evaluation report");
    report->add_option("--store", report_args.store_inputs, "Store records (JSON lines files or directories)");
    report->add_option("--eval-json", report_args.eval_json, "Evaluation report written by eval or sweep");
    report->add_flag("--json", report_args.json, "Orphan report as JSON");

    SweepArgs sweep_args;
    RetrievalFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "Run the chunker x alpha x re-ranker grid and report");
    sweep->add_option("--gold", sweep_args.gold, "Gold annotations (JSON lines)")->required();
    sweep->add_option("--docs", sweep_args.docs, "HTML/JSON files or directories")->required();
    add_completion(sweep, sweep_args.completion);
    sweep->add_option("--out", sweep_args.out_dir, "Output directory")->capture_default_str();
    sweep_flags.add(sweep, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const Io io{out, err};
    try {
        Settings settings = load_settings(config_path.empty() ? std::nullopt
                                                              : std::optional<std::filesystem::path>(config_path));
        auto require_client = [&](const CompletionArgs& c) {
            if (c.replay.empty() && c.endpoint.empty() && !settings.http_configured)
                throw ConfigError("one of --replay or --endpoint is required");
        };
        if (command == "parse") {
            cmd_parse(parse_args, io);
        } else if (command == "extract") {
            extract_flags.apply(settings.retrieval);
            require_client(extract_args.completion);
            cmd_extract(extract_args, settings, io);
        } else if (command == "eval") {
            cmd_eval(eval_args, io);
        } else if (command == "link") {
            link_flags.apply(settings.thresholds);
            cmd_link(link_args, settings, io);
        } else if (command == "ingest") {
            cmd_ingest(ingest_args, io);
        } else if (command == "report") {
            cmd_report(report_args, io);
        } else if (command == "sweep") {
            sweep_flags.apply(settings.retrieval);
            require_client(sweep_args.completion);
            cmd_sweep(sweep_args, settings, io);
        }
    } catch (const ConfigError& e) {
        report_error(err, command, e.kind(), e.what());
        return kExitUsage;
    } catch (const Error& e) {
        report_error(err, command, e.kind(), e.what());
        return kExitDataError;
    } catch (const std::exception& e) {
        report_error(err, command, "Internal", e.what());
        return kExitDataError;
    }
    return kExitOk;
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace gtrx::cli
