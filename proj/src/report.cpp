#include "deforge/report.hpp"

#include <json.hpp>

namespace deforge {

namespace {

using nlohmann::json;

bool valid_provenance(const std::string& p) {
    return p.empty() || p == "paper" || p == "derived" || p == "external" || p == "trivial";
}

}  // namespace

void Report::add(std::string key, std::string value, std::string provenance) {
    if (!valid_provenance(provenance))
        throw InvariantViolation("unknown provenance tag '" + provenance + "'");
    if (has(key)) throw InvariantViolation("duplicate report key '" + key + "'");
    items.push_back({std::move(key), std::move(value), std::move(provenance)});
}

bool Report::has(const std::string& key) const {
    for (const ReportItem& item : items)
        if (item.key == key) return true;
    return false;
}

const std::string& Report::value_of(const std::string& key) const {
    for (const ReportItem& item : items)
        if (item.key == key) return item.value;
    throw UnknownName("report has no item '" + key + "'");
}

std::string emit_report(const Report& r) {
    // json objects keep keys sorted, so the layout is canonical; the item
    // array preserves insertion order, which the caller controls.
    json items = json::array();
    for (const ReportItem& item : r.items) {
        if (!valid_provenance(item.provenance))
            throw InvariantViolation("unknown provenance tag '" + item.provenance + "'");
        json o{{"key", item.key}, {"value", item.value}};
        if (!item.provenance.empty()) o["provenance"] = item.provenance;
        items.push_back(std::move(o));
    }
    json doc{{"schema", report_schema}, {"command", r.command}, {"seed", r.seed},
             {"items", std::move(items)}};
    return doc.dump(2) + "\n";
}

Report parse_report(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("report is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("schema").get<std::string>() != report_schema)
            throw ParseError("unsupported report schema '" +
                             doc.at("schema").get<std::string>() + "'");
        Report r;
        r.command = doc.at("command").get<std::string>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        for (const json& o : doc.at("items")) {
            ReportItem item;
            item.key = o.at("key").get<std::string>();
            item.value = o.at("value").get<std::string>();
            if (o.contains("provenance")) item.provenance = o.at("provenance").get<std::string>();
            if (!valid_provenance(item.provenance))
                throw ParseError("unknown provenance tag '" + item.provenance + "'");
            r.items.push_back(std::move(item));
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("report shape mismatch: ") + e.what());
    }
}

}  // namespace deforge
