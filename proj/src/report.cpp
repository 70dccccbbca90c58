#include "refbench/report.hpp"

#include <cstdio>

#include <json.hpp>

#include "refbench/corpus.hpp"

using nlohmann::json;

namespace refbench {

double MetricsReport::precision() const {
    return extraction ? extraction->precision : metrics.precision;
}

double MetricsReport::recall() const {
    return extraction ? extraction->recall : metrics.recall;
}

double MetricsReport::micro_f1() const {
    return extraction ? extraction->f1 : metrics.micro_f1;
}

namespace {

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

json metrics_to_json(const Metrics& m) {
    json per_field = json::object();
    for (const auto& [f, prf] : m.per_field)
        per_field[field_name(f)] = {{"precision", prf.precision},
                                    {"recall", prf.recall},
                                    {"f1", prf.f1},
                                    {"tp", prf.tp},
                                    {"pred_count", prf.pred_count},
                                    {"gold_count", prf.gold_count}};
    return {{"precision", m.precision}, {"recall", m.recall},
            {"micro_f1", m.micro_f1},   {"macro_f1", m.macro_f1},
            {"per_field", per_field},   {"n_records", m.n_records}};
}

Metrics metrics_from_json(const json& j) {
    Metrics m;
    m.precision = j.value("precision", 0.0);
    m.recall = j.value("recall", 0.0);
    m.micro_f1 = j.value("micro_f1", 0.0);
    m.macro_f1 = j.value("macro_f1", 0.0);
    m.n_records = j.value("n_records", size_t{0});
    if (j.contains("per_field")) {
        for (const auto& [name, prf] : j["per_field"].items()) {
            auto f = field_from_name(name);
            if (!f) continue;
            FieldPRF p;
            p.precision = prf.value("precision", 0.0);
            p.recall = prf.value("recall", 0.0);
            p.f1 = prf.value("f1", 0.0);
            p.tp = prf.value("tp", 0.0);
            p.pred_count = prf.value("pred_count", size_t{0});
            p.gold_count = prf.value("gold_count", size_t{0});
            m.per_field[*f] = p;
        }
    }
    return m;
}

json histogram_to_json(const CategoryHistogram& h) {
    return {{"correct", h.correct},
            {"minor", h.minor},
            {"major", h.major},
            {"structural", h.structural}};
}

CategoryHistogram histogram_from_json(const json& j) {
    CategoryHistogram h;
    h.correct = j.value("correct", size_t{0});
    h.minor = j.value("minor", size_t{0});
    h.major = j.value("major", size_t{0});
    h.structural = j.value("structural", size_t{0});
    return h;
}

json extraction_to_json(const ExtractionScore& s) {
    json out = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                {"tp", s.tp},               {"n_gold", s.n_gold}, {"n_pred", s.n_pred},
                {"n_matched", s.n_matched}};
    if (s.avg_sim) out["avg_sim"] = *s.avg_sim;
    return out;
}

ExtractionScore extraction_from_json(const json& j) {
    ExtractionScore s;
    s.precision = j.value("precision", 0.0);
    s.recall = j.value("recall", 0.0);
    s.f1 = j.value("f1", 0.0);
    s.tp = j.value("tp", 0.0);
    s.n_gold = j.value("n_gold", size_t{0});
    s.n_pred = j.value("n_pred", size_t{0});
    s.n_matched = j.value("n_matched", size_t{0});
    if (j.contains("avg_sim")) s.avg_sim = j["avg_sim"].get<double>();
    return s;
}

}  // namespace

std::string report_to_json_text(const MetricsReport& report) {
    json breakdowns = json::object();
    for (const auto& [key, groups] : report.breakdowns) {
        json group_json = json::object();
        for (const auto& [label, rep] : groups) {
            json g = {{"metrics", metrics_to_json(rep.metrics)},
                      {"histogram", histogram_to_json(rep.histogram)},
                      {"n_documents", rep.n_documents}};
            if (rep.extraction) g["extraction"] = extraction_to_json(*rep.extraction);
            group_json[label] = std::move(g);
        }
        breakdowns[key] = std::move(group_json);
    }
    json obj = {{"format_version", report.format_version},
                {"dataset", report.dataset},
                {"task", report.task},
                {"strategy", report.strategy},
                {"backend", report.backend},
                {"manifest_hash", report.manifest_hash},
                {"metrics", metrics_to_json(report.metrics)},
                {"histogram", histogram_to_json(report.histogram)},
                {"breakdowns", breakdowns},
                {"n_failures", report.n_failures},
                {"runtime_seconds", report.runtime_seconds}};
    if (report.extraction) obj["extraction"] = extraction_to_json(*report.extraction);
    return obj.dump(2) + "\n";
}

MetricsReport report_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw FormatError(std::string("invalid report JSON: ") + ex.what(), 0);
    }
    MetricsReport r;
    r.format_version = j.value("format_version", 0);
    r.dataset = j.value("dataset", "");
    r.task = j.value("task", "");
    r.strategy = j.value("strategy", "");
    r.backend = j.value("backend", "");
    r.manifest_hash = j.value("manifest_hash", "");
    if (j.contains("metrics")) r.metrics = metrics_from_json(j["metrics"]);
    if (j.contains("extraction")) r.extraction = extraction_from_json(j["extraction"]);
    if (j.contains("histogram")) r.histogram = histogram_from_json(j["histogram"]);
    r.n_failures = j.value("n_failures", size_t{0});
    r.runtime_seconds = j.value("runtime_seconds", 0.0);
    if (j.contains("breakdowns")) {
        for (const auto& [key, groups] : j["breakdowns"].items()) {
            for (const auto& [label, rep] : groups.items()) {
                GroupReport g;
                if (rep.contains("metrics")) g.metrics = metrics_from_json(rep["metrics"]);
                if (rep.contains("histogram"))
                    g.histogram = histogram_from_json(rep["histogram"]);
                if (rep.contains("extraction"))
                    g.extraction = extraction_from_json(rep["extraction"]);
                g.n_documents = rep.value("n_documents", size_t{0});
                r.breakdowns[key][label] = std::move(g);
            }
        }
    }
    return r;
}

namespace {

bool any_extraction(const std::vector<MetricsReport>& reports) {
    for (const auto& r : reports)
        if (r.extraction) return true;
    return false;
}

std::vector<std::string> report_row(const MetricsReport& r, bool with_avg_sim) {
    std::vector<std::string> row = {r.dataset, r.task, r.strategy, r.backend,
                                    fmt4(r.precision()), fmt4(r.recall()),
                                    fmt4(r.micro_f1())};
    row.push_back(r.extraction ? "--" : fmt4(r.metrics.macro_f1));
    row.push_back(std::to_string(r.n_failures));
    row.push_back(fmt2(r.runtime_seconds));
    if (with_avg_sim) {
        if (r.extraction && r.extraction->avg_sim)
            row.push_back(fmt4(*r.extraction->avg_sim));
        else
            row.push_back("--");
    }
    return row;
}

std::vector<std::string> header_row(bool with_avg_sim) {
    std::vector<std::string> h = {"Dataset", "Task",    "Strategy", "Backend", "P",
                                  "R",       "MicroF1", "MacroF1",  "Fail",    "Runtime_s"};
    if (with_avg_sim) h.push_back("AvgSim");
    return h;
}

}  // namespace

std::string reports_to_csv(const std::vector<MetricsReport>& reports) {
    bool avg = any_extraction(reports);
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    };
    emit(header_row(avg));
    for (const auto& r : reports) emit(report_row(r, avg));
    return out;
}

std::string reports_to_markdown(const std::vector<MetricsReport>& reports) {
    bool avg = any_extraction(reports);
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        out += '|';
        for (const auto& cell : row) {
            out += ' ';
            out += cell;
            out += " |";
        }
        out += '\n';
    };
    auto header = header_row(avg);
    emit(header);
    out += '|';
    for (size_t i = 0; i < header.size(); ++i) out += " --- |";
    out += '\n';
    for (const auto& r : reports) emit(report_row(r, avg));
    return out;
}

std::string reports_to_json(const std::vector<MetricsReport>& reports) {
    json rows = json::array();
    for (const auto& r : reports) rows.push_back(json::parse(report_to_json_text(r)));
    return rows.dump(2) + "\n";
}

}  // namespace refbench
