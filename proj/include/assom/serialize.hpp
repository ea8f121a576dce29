#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "assom/errors.hpp"
#include "assom/network.hpp"

namespace assom {

constexpr int kNetworkSchemaVersion = 1;

// Schema: {version, D, H, N, modules: [{index, basis: [[f64;D];H]}]}.
// nlohmann emits shortest round-trip representations for doubles, so the
// basis survives a write/read cycle bit-exactly.
inline nlohmann::json network_to_json(const AssomNetwork& net) {
    nlohmann::json doc;
    doc["version"] = kNetworkSchemaVersion;
    doc["D"] = net.input_dim;
    doc["H"] = net.subspace_dim;
    doc["N"] = net.modules.size();
    doc["modules"] = nlohmann::json::array();
    for (const auto& module : net.modules) {
        nlohmann::json m;
        m["index"] = module.index;
        m["basis"] = module.basis.vectors();
        doc["modules"].push_back(std::move(m));
    }
    return doc;
}

inline AssomNetwork network_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("version").get<int>() != kNetworkSchemaVersion)
            throw ParseError("network document: unsupported version " +
                             doc.at("version").dump());
        AssomNetwork net;
        net.input_dim = doc.at("D").get<std::size_t>();
        net.subspace_dim = doc.at("H").get<std::size_t>();
        const auto module_count = doc.at("N").get<std::size_t>();
        const auto& modules = doc.at("modules");
        if (modules.size() != module_count)
            throw ParseError("network document: N=" + std::to_string(module_count) +
                             " but " + std::to_string(modules.size()) + " modules present");
        std::vector<bool> seen(module_count, false);
        for (const auto& m : modules) {
            AssomModule module;
            module.index = m.at("index").get<std::size_t>();
            if (module.index >= module_count || seen[module.index])
                throw ParseError("network document: bad or duplicate module index " +
                                 std::to_string(module.index));
            seen[module.index] = true;
            auto vectors = m.at("basis").get<std::vector<Vector>>();
            if (vectors.size() != net.subspace_dim)
                throw ParseError("network document: module " + std::to_string(module.index) +
                                 " has " + std::to_string(vectors.size()) + " basis vectors, expected H=" +
                                 std::to_string(net.subspace_dim));
            for (const auto& v : vectors)
                if (v.size() != net.input_dim)
                    throw ParseError("network document: basis vector length mismatch in module " +
                                     std::to_string(module.index));
            module.basis = BasisSet::from_orthonormal(std::move(vectors), 1e-8);
            module.prev_basis = module.basis;
            net.modules.push_back(std::move(module));
        }
        std::sort(net.modules.begin(), net.modules.end(),
                  [](const AssomModule& a, const AssomModule& b) { return a.index < b.index; });
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network document: ") + e.what());
    } catch (const DegenerateBasis& e) {
        throw ParseError(std::string("network document: ") + e.what());
    }
}

inline void save_network(const AssomNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << network_to_json(net).dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

inline AssomNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return network_from_json(doc);
}

} // namespace assom
