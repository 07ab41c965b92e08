#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <set>

#include <json.hpp>

#include "gtrx/errors.hpp"
#include "gtrx/fileio.hpp"
#include "gtrx/store.hpp"

namespace gtrx::cli {

namespace fs = std::filesystem;

namespace {

bool has_extension(const fs::path& p, std::string_view ext) { return text::iequals(p.extension().string(), ext); }

/// Expands directories to their files with one of `extensions`, sorted.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs,
                                    std::initializer_list<std::string_view> extensions) {
    std::vector<fs::path> out;
    for (const auto& in : inputs) {
        const fs::path p(in);
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p, ec)) {
                if (!e.is_regular_file()) continue;
                for (auto ext : extensions)
                    if (has_extension(e.path(), ext)) found.push_back(e.path());
            }
            if (ec) throw IoFailure("cannot list '" + in + "': " + ec.message());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::exists(p, ec)) {
            out.push_back(p);
        } else {
            throw IoFailure("input '" + in + "' does not exist");
        }
    }
    return out;
}

void write_output(const std::string& path, const std::string& content, const Io& io) {
    fileio::write_file_atomic(path, content);
    io.log("wrote " + path);
}

std::unique_ptr<extraction::CompletionClient> make_client(const CompletionArgs& a, const Settings& s) {
    if (!a.replay.empty()) return std::make_unique<extraction::ReplayClient>(
                                   extraction::ReplayClient::from_jsonl(fileio::read_file(a.replay)));
    auto http = s.http;
    if (!a.endpoint.empty()) http.base_url = a.endpoint;
    if (!a.model.empty()) http.model = a.model;
    return std::make_unique<extraction::HttpCompletionClient>(http);
}

std::string predictions_jsonl(const std::vector<extraction::Prediction>& preds) {
    std::string out;
    for (const auto& p : preds) out += extraction::prediction_to_json(p) + "\n";
    return out;
}

struct RowKey {
    int group = 0;  // 0 None, 1 Simple, 2 Hierarchical
    double alpha = 0.0;
    bool reranker = false;
};

RowKey row_key(const std::string& label) {
    if (label == "full_document") return {0, 0.0, false};
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto bar = label.find('|', start);
        parts.push_back(label.substr(start, bar - start));
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    if (parts.size() != 3) throw InvalidInput("unrecognised prediction config '" + label + "'");
    RowKey k;
    const auto chunker = retrieval::chunker_from_string(parts[0]);
    if (!chunker) throw InvalidInput("unrecognised chunker in config '" + label + "'");
    k.group = *chunker == retrieval::ChunkerKind::Sliding ? 1 : 2;
    try {
        k.alpha = std::stod(parts[1]);
    } catch (const std::exception&) {
        throw InvalidInput("unrecognised alpha in config '" + label + "'");
    }
    k.reranker = parts[2] == "rr";
    return k;
}

std::string describe_row(const eval::ReportRow& r) {
    if (!r.alpha) return r.chunker;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s, alpha=%.2f, re-ranker %s", r.chunker.c_str(), *r.alpha,
                  r.reranker ? "on" : "off");
    return buf;
}

void ingest_into(store::Store& st, const std::vector<std::string>& inputs, const Io& io) {
    for (const auto& path : expand_inputs(inputs, {".jsonl"})) {
        const auto summary = st.ingest(fileio::read_file(path));
        for (const auto& v : summary.violations) io.log(path.string() + ": schema violation: " + v);
    }
}

bool is_csv(const std::string& path) { return has_extension(path, ".csv"); }

}  // namespace

void Io::log(const std::string& message) const { err << "gtrx: " << message << "\n"; }

Settings load_settings(const std::optional<fs::path>& config_file) {
    Settings s;
    if (!config_file) return s;
    const std::string content = fileio::read_file(*config_file);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + config_file->string() + "': " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, section] : j.items()) {
        if (key == "retrieval") {
            s.retrieval = retrieval::config_from_json(section.dump(), s.retrieval);
        } else if (key == "linking") {
            s.thresholds = linking::thresholds_from_json(section.dump(), s.thresholds);
        } else if (key == "completion") {
            if (!section.is_object()) throw ConfigError("'completion' must be an object");
            for (const auto& [k, v] : section.items()) {
                try {
                    if (k == "base_url") {
                        s.http.base_url = v.get<std::string>();
                        s.http_configured = true;
                    }
                    else if (k == "path") s.http.path = v.get<std::string>();
                    else if (k == "model") s.http.model = v.get<std::string>();
                    else if (k == "api_key_env") s.http.api_key_env = v.get<std::string>();
                    else if (k == "timeout_seconds") s.http.timeout_seconds = v.get<int>();
                    else if (k == "temperature") s.http.temperature = v.get<double>();
                    else throw ConfigError("unknown completion setting '" + k + "'");
                } catch (const nlohmann::json::exception&) {
                    throw ConfigError("completion setting '" + k + "' has the wrong type");
                }
            }
        } else {
            throw ConfigError("unknown config section '" + key + "'");
        }
    }
    s.retrieval.validate();
    return s;
}

std::vector<doctree::OpportunityDoc> load_documents(const std::vector<std::string>& inputs) {
    // a parsed .json wins over the .html it came from
    std::map<std::string, fs::path> by_stem;
    for (const auto& p : expand_inputs(inputs, {".html", ".htm", ".json"})) {
        const std::string stem = p.stem().string();
        auto [it, inserted] = by_stem.emplace(stem, p);
        if (!inserted && has_extension(p, ".json")) it->second = p;
    }
    std::vector<doctree::OpportunityDoc> docs;
    std::set<std::string> ids;
    for (const auto& [stem, path] : by_stem) {
        const std::string content = fileio::read_file(path);
        auto doc = has_extension(path, ".json") ? doctree::from_json(content)
                                                : doctree::parse_opportunity_html(content, stem);
        if (!ids.insert(doc.opportunity_id).second)
            throw InvalidInput("duplicate opportunity id '" + doc.opportunity_id + "'");
        docs.push_back(std::move(doc));
    }
    std::sort(docs.begin(), docs.end(),
              [](const auto& a, const auto& b) { return a.opportunity_id < b.opportunity_id; });
    return docs;
}

void cmd_parse(const ParseArgs& a, const Io& io) {
    const auto docs = load_documents(a.inputs);
    for (const auto& doc : docs) {
        const std::string json = doctree::to_json(doc);
        if (a.out_dir.empty()) {
            io.out << json;
            continue;
        }
        write_output((fs::path(a.out_dir) / (doc.opportunity_id + ".json")).string(), json, io);
        if (a.markdown)
            write_output((fs::path(a.out_dir) / (doc.opportunity_id + ".md")).string(),
                         doctree::serialize_markdown(doc.root) + "\n", io);
    }
    io.log("parsed " + std::to_string(docs.size()) + " document(s)");
}

void cmd_extract(const ExtractArgs& a, const Settings& s, const Io& io) {
    const auto docs = load_documents(a.inputs);
    const auto client = make_client(a.completion, s);
    extraction::ExtractionSettings settings;
    settings.mode = a.full_document ? extraction::ExtractionMode::FullDocument : extraction::ExtractionMode::Retrieval;
    settings.retrieval = s.retrieval;
    std::string trace;
    if (!a.trace.empty()) settings.trace_sink = [&trace](const std::string& line) { trace += line + "\n"; };

    std::vector<extraction::Prediction> preds;
    int warnings = 0;
    for (const auto& doc : docs) {
        const auto result = extraction::extract_fields(doc, settings, *client);
        for (const auto& w : result.warnings.messages) io.log(doc.opportunity_id + ": " + w);
        warnings += result.warnings.count;
        const auto p = extraction::to_predictions(result);
        preds.insert(preds.end(), p.begin(), p.end());
    }
    write_output(a.output, predictions_jsonl(preds), io);
    if (!a.trace.empty()) write_output(a.trace, trace, io);
    io.out << "extracted " << preds.size() << " predictions from " << docs.size() << " document(s) ("
           << settings.mode_label() << ", " << warnings << " normalization warning(s))\n";
}

eval::Report build_report(const std::vector<eval::GoldAnnotation>& gold,
                          const std::vector<extraction::Prediction>& predictions,
                          const std::vector<doctree::OpportunityDoc>& docs) {
    std::map<std::string, std::vector<extraction::Prediction>> by_config;
    for (const auto& p : predictions) by_config[p.config].push_back(p);
    if (by_config.empty()) throw InvalidInput("no predictions to evaluate");

    struct Entry {
        RowKey key;
        std::string config;
    };
    std::vector<Entry> entries;
    for (const auto& [config, preds] : by_config) entries.push_back({row_key(config), config});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.key.group, a.key.alpha, a.key.reranker) < std::tie(b.key.group, b.key.alpha, b.key.reranker);
    });

    static const char* kGroupNames[] = {"None", "Simple", "Hierarchical"};
    eval::Report report;
    std::size_t best = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        eval::ReportRow row;
        row.chunker = kGroupNames[entries[i].key.group];
        if (entries[i].key.group != 0) row.alpha = entries[i].key.alpha;
        row.reranker = entries[i].key.reranker;
        row.metrics = eval::score_predictions(gold, by_config[entries[i].config]);
        report.rows.push_back(std::move(row));
        if (report.rows[i].metrics.overall.correct > report.rows[best].metrics.overall.correct) best = i;
    }
    report.taxonomy_label = describe_row(report.rows[best]);
    report.taxonomy = eval::summarize(eval::classify_errors(gold, by_config[entries[best].config], docs));
    return report;
}

void cmd_eval(const EvalArgs& a, const Io& io) {
    const auto gold = eval::read_gold(fileio::read_file(a.gold));
    const auto preds = extraction::read_predictions(fileio::read_file(a.predictions));
    const auto docs = a.docs.empty() ? std::vector<doctree::OpportunityDoc>{} : load_documents(a.docs);
    const auto report = build_report(gold, preds, docs);
    const std::string text = eval::render_report(report);
    io.out << text;
    if (!a.output.empty()) write_output(a.output, text, io);
    if (!a.json.empty()) write_output(a.json, eval::report_to_json(report), io);
}

void cmd_link(const LinkArgs& a, const Settings& s, const Io& io) {
    if (a.applications.empty() && a.appearances.empty())
        throw InvalidInput("link needs --applications and/or --appearances");
    const auto& t = s.thresholds;

    store::Store st;
    ingest_into(st, a.store_inputs, io);
    const auto projects = store::project_refs(st);
    const linking::ProjectIndex index(projects);

    std::string links;
    std::size_t n_project = 0, n_opportunity = 0, n_person = 0, skipped = 0;
    std::vector<linking::LinkedPairEvidence> evidence;

    if (!a.applications.empty()) {
        const auto apps = linking::read_applications(fileio::read_file(a.applications), is_csv(a.applications));
        std::map<std::string, linking::MeetingRecord> meetings;
        if (!a.meetings.empty())
            for (auto& m : linking::read_meetings(fileio::read_file(a.meetings), is_csv(a.meetings)))
                meetings.emplace(m.meeting_id, std::move(m));
        std::vector<linking::OpportunityCandidate> opportunities;
        if (!a.opportunities.empty())
            opportunities = linking::read_opportunities(fileio::read_file(a.opportunities), is_csv(a.opportunities));

        for (const auto& app : apps) {
            try {
                if (auto link = linking::link_application_project(app, index)) {
                    links += linking::link_to_json(*link) + "\n";
                    ++n_project;
                    const auto* p = index.project(link->target_id);
                    evidence.push_back({app.organisation, p->lead_organisation, app.pi_surname, p->pi_surname,
                                        app.title, p->title});
                }
            } catch (const AmbiguousMatch& e) {
                ++skipped;
                io.log(std::string("skipped: ") + e.what());
            }
            if (opportunities.empty()) continue;
            try {
                if (auto link = linking::link_application_opportunity(app, meetings, opportunities, t)) {
                    links += linking::link_to_json(*link) + "\n";
                    ++n_opportunity;
                }
            } catch (const UnresolvedMeeting& e) {
                ++skipped;
                io.log(std::string("skipped: ") + e.what());
            }
        }
    }

    if (!a.appearances.empty()) {
        const auto records = linking::read_appearances(fileio::read_file(a.appearances), is_csv(a.appearances));
        const auto clusters = linking::cluster_panel_attendance(records, t);
        const auto persons = store::person_candidates(st);
        std::string cluster_out;
        for (const auto& c : clusters) {
            nlohmann::ordered_json j{{"cluster_id", c.cluster_id}, {"council", c.council}, {"surname", c.surname},
                                     {"initial", std::string(1, c.initial)}};
            j["first_name"] = c.first_name ? nlohmann::ordered_json(*c.first_name) : nlohmann::ordered_json(nullptr);
            j["organisation"] =
                c.organisation ? nlohmann::ordered_json(*c.organisation) : nlohmann::ordered_json(nullptr);
            j["appearance_ids"] = c.appearance_ids;
            cluster_out += j.dump() + "\n";
            if (auto link = linking::align_cluster_person(c, persons, t)) {
                links += linking::link_to_json(*link) + "\n";
                ++n_person;
            }
        }
        if (!a.clusters.empty()) write_output(a.clusters, cluster_out, io);
        io.out << "clusters: " << clusters.size() << "\n";
    }

    write_output(a.output, links, io);
    io.out << "application->project links: " << n_project << "\n"
           << "application->opportunity links: " << n_opportunity << "\n"
           << "cluster->person links: " << n_person << "\n"
           << "skipped records: " << skipped << "\n";
    if (!a.validation.empty()) {
        const auto report = linking::validate_links(evidence, t);
        write_output(a.validation, linking::validation_to_json(report), io);
        io.out << linking::render_validation(report);
    }
}

void cmd_ingest(const IngestArgs& a, const Io& io) {
    store::Store st;
    std::size_t read = 0, stored = 0, violations = 0, reused = 0, derived = 0;
    for (const auto& path : expand_inputs(a.inputs, {".jsonl"})) {
        const auto s = st.ingest(fileio::read_file(path));
        read += s.records_read;
        stored += s.stored;
        violations += s.schema_violations;
        reused += s.ids_reused;
        derived += s.ids_derived;
        for (const auto& v : s.violations) io.log(path.string() + ": schema violation: " + v);
    }
    const std::size_t total = st.reference_count();
    const auto dangling = st.dangling_refs();
    io.out << "records read: " << read << "\n"
           << "records stored: " << stored << "\n"
           << "schema violations: " << violations << "\n"
           << "ids reused: " << reused << "\n"
           << "ids derived: " << derived << "\n"
           << "references: " << total << " (" << total - dangling.size() << " resolved, " << dangling.size()
           << " dangling)\n";
    for (const auto& d : dangling)
        io.log("dangling: " + d.source_table + "/" + d.source_id + "." + d.field + " -> " + d.target_table + "/" +
               d.target_id);
    const auto report = store::orphan_report(st);
    io.out << store::render_orphan_report(report);
    if (!a.report_json.empty()) write_output(a.report_json, store::orphan_report_to_json(report), io);
    if (!a.export_dir.empty()) {
        const auto files = store::export_store(st, a.export_dir);
        io.log("exported " + std::to_string(files.size()) + " file(s) to " + a.export_dir);
    }
}

void cmd_report(const ReportArgs& a, const Io& io) {
    if (a.store_inputs.empty() == a.eval_json.empty())
        throw InvalidInput("report needs exactly one of --store or --eval-json");
    if (!a.eval_json.empty()) {
        io.out << eval::render_report(eval::report_from_json(fileio::read_file(a.eval_json)));
        return;
    }
    store::Store st;
    ingest_into(st, a.store_inputs, io);
    const auto report = store::orphan_report(st);
    io.out << (a.json ? store::orphan_report_to_json(report) : store::render_orphan_report(report));
}

std::vector<SweepConfig> sweep_grid(const retrieval::RetrievalConfig& base) {
    std::vector<SweepConfig> grid;
    grid.push_back({true, base});
    for (auto chunker : {retrieval::ChunkerKind::Sliding, retrieval::ChunkerKind::Hierarchical}) {
        for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            for (bool rr : {false, true}) {
                SweepConfig c{false, base};
                c.retrieval.chunker = chunker;
                c.retrieval.alpha = alpha;
                c.retrieval.use_reranker = rr;
                grid.push_back(c);
            }
        }
    }
    return grid;
}

void cmd_sweep(const SweepArgs& a, const Settings& s, const Io& io) {
    const auto gold = eval::read_gold(fileio::read_file(a.gold));
    const auto docs = load_documents(a.docs);
    const auto client = make_client(a.completion, s);

    std::vector<extraction::Prediction> preds;
    for (const auto& config : sweep_grid(s.retrieval)) {
        extraction::ExtractionSettings settings;
        settings.mode =
            config.full_document ? extraction::ExtractionMode::FullDocument : extraction::ExtractionMode::Retrieval;
        settings.retrieval = config.retrieval;
        for (const auto& doc : docs) {
            const auto p = extraction::to_predictions(extraction::extract_fields(doc, settings, *client));
            preds.insert(preds.end(), p.begin(), p.end());
        }
    }
    const auto report = build_report(gold, preds, docs);
    const std::string text = eval::render_report(report);
    const fs::path dir(a.out_dir);
    write_output((dir / "predictions.jsonl").string(), predictions_jsonl(preds), io);
    write_output((dir / "report.txt").string(), text, io);
    write_output((dir / "report.json").string(), eval::report_to_json(report), io);
    io.out << text;
}

}  // namespace gtrx::cli
