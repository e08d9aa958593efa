#include "acrp/genesis.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace acrp::ledger {

using nlohmann::json;

std::string Genesis::to_json() const {
    json j;
    j["chain_id"] = chain_id;
    j["audit_timeout"] = audit_timeout;
    j["genesis_time"] = genesis_time;
    j["block_interval"] = block_interval;
    j["members"] = json::array();
    for (const auto& m : members)
        j["members"].push_back(m.hex());
    j["auditors"] = json::array();
    for (const auto& a : auditors)
        j["auditors"].push_back(a.hex());
    j["authorities"] = json::array();
    for (const auto& e : authorities) {
        json entry;
        entry["name"] = e.name;
        entry["type"] = e.type ? json(std::string(to_string(*e.type))) : json(nullptr);
        if (!e.region) {
            entry["region"] = nullptr;
        } else if (const auto* box = std::get_if<BoundingBox>(&*e.region)) {
            entry["region"] = {{"bbox", {box->min.lat, box->min.lon, box->max.lat, box->max.lon}}};
        } else {
            json pts = json::array();
            for (const auto& v : std::get<Polygon>(*e.region).vertices)
                pts.push_back({v.lat, v.lon});
            entry["region"] = {{"polygon", pts}};
        }
        entry["key"] = e.authority.hex();
        j["authorities"].push_back(entry);
    }
    return j.dump(2);
}

Genesis Genesis::from_json(std::string_view text) {
    try {
        auto j = json::parse(text);
        Genesis g;
        g.chain_id = j.at("chain_id").get<std::string>();
        g.audit_timeout = j.value("audit_timeout", std::uint64_t{20});
        g.genesis_time = j.value("genesis_time", std::uint64_t{1'700'000'000});
        g.block_interval = j.value("block_interval", std::uint64_t{5});
        for (const auto& m : j.at("members"))
            g.members.push_back(PublicKey::from_hex(m.get<std::string>()));
        for (const auto& a : j.value("auditors", json::array()))
            g.auditors.push_back(PublicKey::from_hex(a.get<std::string>()));
        for (const auto& e : j.value("authorities", json::array())) {
            AuthorityEntry entry;
            entry.name = e.value("name", "");
            if (e.contains("type") && !e["type"].is_null())
                entry.type = parse_report_type(e["type"].get<std::string>());
            if (e.contains("region") && !e["region"].is_null()) {
                const auto& region = e["region"];
                if (region.contains("bbox")) {
                    auto b = region["bbox"].get<std::vector<std::int32_t>>();
                    if (b.size() != 4)
                        throw Error(Errc::Malformed, "bbox needs 4 values");
                    entry.region = BoundingBox{{b[0], b[1]}, {b[2], b[3]}};
                } else {
                    Polygon poly;
                    for (const auto& p : region.at("polygon"))
                        poly.vertices.push_back({p.at(0).get<std::int32_t>(), p.at(1).get<std::int32_t>()});
                    entry.region = poly;
                }
            }
            entry.authority = PublicKey::from_hex(e.at("key").get<std::string>());
            g.authorities.push_back(std::move(entry));
        }
        if (g.members.empty())
            throw Error(Errc::Malformed, "genesis needs at least one consortium member");
        return g;
    } catch (const json::exception& e) {
        throw Error(Errc::Malformed, std::string("genesis: ") + e.what());
    }
}

Genesis Genesis::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::Io, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

Digest Genesis::hash() const { return sha256(as_bytes(json::parse(to_json()).dump())); }

} // namespace acrp::ledger
