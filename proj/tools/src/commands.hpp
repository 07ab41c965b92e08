#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gtrx/doctree.hpp"
#include "gtrx/evalharness.hpp"
#include "gtrx/extraction.hpp"
#include "gtrx/linking.hpp"
#include "gtrx/retrieval.hpp"

namespace gtrx::cli {

/// Built-in defaults, overlaid by the config file, overlaid by explicit flags.
struct Settings {
    retrieval::RetrievalConfig retrieval;
    linking::LinkingThresholds thresholds;
    extraction::HttpCompletionConfig http;
    bool http_configured = false;  // config file set completion.base_url
};

/// Reads {"retrieval": {...}, "linking": {...}, "completion": {...}}; every
/// section is optional and unknown keys are rejected.
Settings load_settings(const std::optional<std::filesystem::path>& config_file);

struct Io {
    std::ostream& out;
    std::ostream& err;
    void log(const std::string& message) const;
};

/// Files (.html or .json) or directories of them, loaded in sorted order.
std::vector<doctree::OpportunityDoc> load_documents(const std::vector<std::string>& inputs);

struct ParseArgs {
    std::vector<std::string> inputs;
    std::string out_dir;
    bool markdown = false;
};
void cmd_parse(const ParseArgs& a, const Io& io);

struct CompletionArgs {
    std::string replay;
    std::string endpoint;
    std::string model;
};

struct ExtractArgs {
    std::vector<std::string> inputs;
    CompletionArgs completion;
    bool full_document = false;
    std::string output = "predictions.jsonl";
    std::string trace;
};
void cmd_extract(const ExtractArgs& a, const Settings& s, const Io& io);

struct EvalArgs {
    std::string gold;
    std::string predictions;
    std::vector<std::string> docs;
    std::string output;
    std::string json;
};
void cmd_eval(const EvalArgs& a, const Io& io);

struct LinkArgs {
    std::string applications;
    std::string meetings;
    std::string opportunities;
    std::string appearances;
    std::vector<std::string> store_inputs;
    std::string output = "links.jsonl";
    std::string clusters;
    std::string validation;
};
void cmd_link(const LinkArgs& a, const Settings& s, const Io& io);

struct IngestArgs {
    std::vector<std::string> inputs;
    std::string export_dir;
    std::string report_json;
};
void cmd_ingest(const IngestArgs& a, const Io& io);

struct ReportArgs {
    std::vector<std::string> store_inputs;
    std::string eval_json;
    bool json = false;
};
void cmd_report(const ReportArgs& a, const Io& io);

struct SweepArgs {
    std::string gold;
    std::vector<std::string> docs;
    CompletionArgs completion;
    std::string out_dir = "sweep";
};
void cmd_sweep(const SweepArgs& a, const Settings& s, const Io& io);

/// The sweep grid: full-document baseline, then sliding and hierarchical
/// chunkers, each over the alpha grid with the re-ranker off and on.
struct SweepConfig {
    bool full_document = false;
    retrieval::RetrievalConfig retrieval;
};
std::vector<SweepConfig> sweep_grid(const retrieval::RetrievalConfig& base);

/// One row per prediction config label, grouped None/Simple/Hierarchical;
/// the taxonomy block describes the most accurate row.
eval::Report build_report(const std::vector<eval::GoldAnnotation>& gold,
                          const std::vector<extraction::Prediction>& predictions,
                          const std::vector<doctree::OpportunityDoc>& docs);

}  // namespace gtrx::cli
