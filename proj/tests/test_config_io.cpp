#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fraclab/config.hpp"
#include "fraclab/domain_grid.hpp"
#include "fraclab/error.hpp"
#include "fraclab/io.hpp"

using namespace fraclab;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"(version = 1
[domain]
dimension = 2
shape = union
boxes = 0 1 0 0.5; 0 0.5 0 1
h = 0.125
refine = 3
[load]
kind = bump
value = 2.5
center = 0.25 0.25
radius = 0.4
[solver]
s = 0.3
grad_tol = 1e-9
method = gradient
[sweep]
p = 1.25, 1.1
[output]
dir = out/x
gnuplot = true
kernel_cache = cache
)";

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fraclab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("run config parses and round-trips") {
    const RunConfig cfg = parse_run_config(kBase);
    CHECK(cfg.domain.dimension == 2);
    CHECK(cfg.domain.shape == ShapeKind::BoxUnion);
    CHECK(cfg.domain.boxes.size() == 2);
    CHECK(cfg.domain.h == 0.125);
    CHECK(cfg.refine == 3);
    CHECK(cfg.load.kind == LoadKind::Bump);
    CHECK(cfg.load.radius == 0.4);
    CHECK(cfg.solver.s == 0.3);
    CHECK(cfg.solver.method == SolverMethod::ProjectedGradient);
    CHECK(cfg.p_schedule == std::vector<double>{1.25, 1.1});
    CHECK(cfg.gnuplot);
    CHECK(cfg.kernel_cache == "cache");

    const RunConfig again = parse_run_config(to_ini(cfg));
    CHECK(to_ini(again) == to_ini(cfg));
    CHECK(again.domain.boxes[1].hi[1] == 1.0);
    CHECK(again.solver.grad_tol == 1e-9);
}

TEST_CASE("cells determine h from the interval width") {
    const RunConfig cfg = parse_run_config("version = 1\n[domain]\nlo = -16\nhi = 16\ncells = 256\n");
    CHECK(cfg.domain.h == 0.125);
    CHECK(build_grid(cfg.domain).size() == 256);
}

TEST_CASE("malformed configs are rejected") {
    CHECK_THROWS_AS(parse_run_config("version = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[domain]\nlo = 0\nhi = 1\nh = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("version = 1\n[domain]\nlo = 0\nhi = 1\nh = 0.5\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("version = 1\n[extras]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("version = 1\n[domain]\nlo = 0\nhi = 1\nh = 0.5\n[sweep]\np = 1.2, 1.4\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("version = 1\n[domain]\nlo = 1\nhi = 0\nh = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("version = 1\n[domain]\nlo = 0\nhi = 1\nh = x\n"), ConfigError);
}

TEST_CASE("bundled configs load") {
    for (const char* name : {"interval16.ini", "interval64.ini"}) {
        const RunConfig cfg = load_run_config(std::string(FRACLAB_SOURCE_DIR) + "/configs/" + name);
        CHECK(build_grid(cfg.domain).size() == 256);
    }
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.ini"), ConfigError);
}

TEST_CASE("kernel JSON round trip and cache") {
    const DomainSpec spec = DomainSpec::interval(0.0, 1.0, 0.25);
    const Grid g = build_grid(spec);
    const KernelSet k = build_kernel(g, 1.6, 3);
    const std::string key = io::kernel_key(spec, 1.6, 3);
    const KernelSet back = io::kernel_from_json(io::kernel_to_json(g, k, key), key);
    CHECK(back.packed_pairs == k.packed_pairs);
    CHECK(back.tails == k.tails);
    CHECK(back.exponent == k.exponent);
    CHECK_THROWS_AS(io::kernel_from_json(io::kernel_to_json(g, k, key), io::kernel_key(spec, 1.7, 3)), ConfigError);
    CHECK_THROWS_AS(io::kernel_from_json("{\"version\": 99}", key), ConfigError);
    CHECK_THROWS_AS(io::kernel_from_json("not json", key), ConfigError);

    const fs::path dir = scratch("cache");
    const KernelSet c1 = io::cached_kernel(spec, g, 1.6, 3, dir.string());
    CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
    const KernelSet c2 = io::cached_kernel(spec, g, 1.6, 3, dir.string());
    CHECK(c1.packed_pairs == k.packed_pairs);
    CHECK(c2.tails == k.tails);
    fs::remove_all(dir);
}

TEST_CASE("field CSV round trip") {
    const Grid g = build_grid(DomainSpec::box({0.0, 0.0}, {1.0, 0.5}, 0.25));
    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1.0 / (3.0 + i);
    const fs::path dir = scratch("csv");
    const std::string path = (dir / "sub" / "field.csv").string();
    io::write_field_csv(path, g, u);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "cell,x,y,value");
    CHECK(io::read_field_csv(path, g.size()) == u);
    CHECK_THROWS_AS(io::read_field_csv(path, g.size() + 1), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("double formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(io::format_double(v)) == v);
}
