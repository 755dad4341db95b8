#include "fraclab/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "fraclab/error.hpp"

namespace fraclab::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string kernel_key(const DomainSpec& spec, double exponent, int refine) {
    std::ostringstream k;
    k << "n=" << spec.dimension << ";shape=" << static_cast<int>(spec.shape) << ";h=" << format_double(spec.h);
    for (const auto& b : spec.boxes)
        k << ";box=" << format_double(b.lo[0]) << "," << format_double(b.hi[0]) << "," << format_double(b.lo[1]) << ","
          << format_double(b.hi[1]);
    if (spec.shape == ShapeKind::Ball)
        k << ";ball=" << format_double(spec.center[0]) << "," << format_double(spec.center[1]) << ","
          << format_double(spec.radius);
    k << ";exponent=" << format_double(exponent) << ";refine=" << refine;
    return k.str();
}

std::string kernel_to_json(const Grid& grid, const KernelSet& kernel, const std::string& key) {
    json doc;
    doc["version"] = kCacheVersion;
    doc["key"] = key;
    doc["dimension"] = kernel.dimension;
    doc["exponent"] = kernel.exponent;
    doc["refine"] = kernel.refine;
    doc["h"] = kernel.h;
    doc["cell_measure"] = grid.cell_measure;
    json cells = json::array();
    for (const auto& c : grid.cells) cells.push_back({c.index[0], c.index[1]});
    doc["cells"] = std::move(cells);
    doc["pairs"] = kernel.packed_pairs;
    doc["tails"] = kernel.tails;
    return doc.dump();
}

KernelSet kernel_from_json(const std::string& text, const std::string& key) {
    try {
        const json doc = json::parse(text);
        if (doc.at("version").get<int>() != kCacheVersion) throw ConfigError("kernel cache version mismatch");
        if (doc.at("key").get<std::string>() != key) throw ConfigError("kernel cache key mismatch");
        KernelSet k;
        k.dimension = doc.at("dimension").get<int>();
        k.exponent = doc.at("exponent").get<double>();
        k.refine = doc.at("refine").get<int>();
        k.h = doc.at("h").get<double>();
        k.cells = doc.at("cells").size();
        k.packed_pairs = doc.at("pairs").get<std::vector<double>>();
        k.tails = doc.at("tails").get<std::vector<double>>();
        if (k.tails.size() != k.cells || k.packed_pairs.size() != k.cells * (k.cells - 1) / 2)
            throw ConfigError("kernel cache has inconsistent sizes");
        return k;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed kernel cache: ") + e.what());
    }
}

KernelSet cached_kernel(const DomainSpec& spec, const Grid& grid, double exponent, int refine,
                        const std::string& cache_dir) {
    if (cache_dir.empty()) return build_kernel(grid, exponent, refine);
    const std::string key = kernel_key(spec, exponent, refine);
    char name[40];
    std::snprintf(name, sizeof name, "kernel-%016zx.json", std::hash<std::string>{}(key));
    const auto path = std::filesystem::path(cache_dir) / name;
    if (std::ifstream in{path}) {
        std::ostringstream text;
        text << in.rdbuf();
        KernelSet k = kernel_from_json(text.str(), key);
        if (k.cells == grid.size()) return k;
    }
    KernelSet k = build_kernel(grid, exponent, refine);
    std::filesystem::create_directories(cache_dir);
    write_text(path.string(), kernel_to_json(grid, k, key));
    return k;
}

void write_field_csv(const std::string& path, const Grid& grid, std::span<const double> u) {
    std::ostringstream out;
    out << (grid.dimension == 1 ? "cell,x,value\n" : "cell,x,y,value\n");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << i << "," << format_double(grid.cells[i].center[0]);
        if (grid.dimension == 2) out << "," << format_double(grid.cells[i].center[1]);
        out << "," << format_double(u[i]) << "\n";
    }
    write_text(path, out.str());
}

std::vector<double> read_field_csv(const std::string& path, std::size_t cells) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read field file '" + path + "'");
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> u;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find_last_of(',');
        if (comma == std::string::npos) throw ConfigError("malformed field row '" + line + "'");
        try {
            u.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ConfigError("malformed field value in '" + line + "'");
        }
    }
    if (u.size() != cells)
        throw ConfigError("field file has " + std::to_string(u.size()) + " rows, grid has " + std::to_string(cells));
    return u;
}

void write_text(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

}  // namespace fraclab::io
