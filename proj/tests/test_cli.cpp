#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "masslab/runner.hpp"
#include "masslab/snapshot.hpp"

using namespace masslab;
namespace fs = std::filesystem;

namespace {

std::string strip_timing(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("timing.", 0) != 0) out += line + "\n";
    return out;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("masslab_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace

TEST_CASE("scenario config parsing") {
    const std::string text = R"(
# a comment
scenario = ep_check
[grid]
n = 256
L = 40
[physics]
masses = 1, 2
c = inf
g = 0.5        # inline comment
[numerics]
dt = 1e-3
t_final = 0.05
)";
    const ScenarioConfig cfg = ScenarioConfig::parse(text);
    CHECK(cfg.kind() == ScenarioKind::ep_check);
    CHECK(cfg.get_size("grid.n") == 256);
    CHECK(cfg.get_double("physics.g") == 0.5);
    CHECK(std::isinf(cfg.get_double("physics.c")));
    CHECK(cfg.get_list("physics.masses") == std::vector<double>{1.0, 2.0});
    CHECK(cfg.get_double("numerics.dt") == 1e-3);
    CHECK(cfg.get_double("physics.hbar", 1.0) == 1.0);  // fallback

    SECTION("missing fields are named") {
        try {
            cfg.get_double("numerics.missing_thing");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("numerics.missing_thing") != std::string::npos);
        }
    }
    SECTION("broadcast lists") {
        CHECK(cfg.get_broadcast_list("physics.x0", 2, 0.0) == std::vector<double>{0.0, 0.0});
        CHECK(cfg.get_broadcast_list("physics.masses", 2, 0.0) ==
              std::vector<double>{1.0, 2.0});
    }
    SECTION("malformed lines rejected") {
        CHECK_THROWS_AS(ScenarioConfig::parse("justakey\n"), config_error);
        CHECK_THROWS_AS(ScenarioConfig::parse("[unclosed\n"), config_error);
    }
    SECTION("bad numbers rejected with the field name") {
        const auto bad = ScenarioConfig::parse("scenario = ep_check\n[physics]\ng = alot\n");
        try {
            bad.get_double("physics.g");
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("physics.g") != std::string::npos);
        }
    }
    SECTION("unknown scenario named") {
        const auto bad = ScenarioConfig::parse("scenario = warp_drive\n");
        CHECK_THROWS_AS(bad.kind(), config_error);
    }
}

TEST_CASE("snapshot roundtrip") {
    TempDir tmp;
    const SpatialGrid g = make_spatial_grid(64, 40.0);
    wave psi = gaussian_packet(g, 0.3, 1.0, 1.0);
    for (auto& z : psi) z *= 1.0 / std::sqrt(2.0);
    const auto state = make_superposition(
        {MassChannel{1.0, 0.25, g, psi}, MassChannel{2.0, 0.25, g, psi}});

    SECTION("superposition: bitwise-equal samples") {
        const std::string path = (tmp.path / "state.mlsnap").string();
        save_snapshot(state, path);
        const Snapshot loaded = load_snapshot(path);
        const auto& back = std::get<SuperpositionState>(loaded);
        REQUIRE(back.size() == 2);
        CHECK(back.t() == 0.25);
        CHECK(back.grid() == g);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(back.channels[i].mass == state.channels[i].mass);
            for (std::size_t j = 0; j < g.n; ++j) {
                CHECK(back.channels[i].psi[j].real() == state.channels[i].psi[j].real());
                CHECK(back.channels[i].psi[j].imag() == state.channels[i].psi[j].imag());
            }
        }
    }
    SECTION("extended field roundtrip") {
        const SGrid sg = make_sgrid(8, 2.0 * std::numbers::pi);
        const ExtendedField f = channels_to_sfield(state, sg, Constants{});
        const std::string path = (tmp.path / "field.mlsnap").string();
        save_snapshot(f, path);
        const Snapshot loaded = load_snapshot(path);
        const auto& back = std::get<ExtendedField>(loaded);
        CHECK(back.sgrid == sg);
        CHECK(back.t == f.t);
        for (std::size_t i = 0; i < f.field.size(); ++i) {
            CHECK(back.field[i].real() == f.field[i].real());
            CHECK(back.field[i].imag() == f.field[i].imag());
        }
    }
    SECTION("corrupted payload detected") {
        const std::string path = (tmp.path / "corrupt.mlsnap").string();
        save_snapshot(state, path);
        std::fstream file(path, std::ios::in | std::ios::out | std::ios::binary);
        file.seekp(100);
        const char byte = 0x5a;
        file.write(&byte, 1);
        file.close();
        CHECK_THROWS_AS(load_snapshot(path), snapshot_error);
    }
    SECTION("version mismatch detected") {
        const std::string path = (tmp.path / "version.mlsnap").string();
        save_snapshot(state, path);
        // bump the version field and rewrite the checksum accordingly
        std::ifstream in(path, std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        in.close();
        bytes[12] = 2;
        const auto crc = snapshot_detail::crc32(
            reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size() - 4);
        std::memcpy(bytes.data() + bytes.size() - 4, &crc, 4);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        try {
            load_snapshot(path);
            FAIL("expected snapshot_error");
        } catch (const snapshot_error& e) {
            CHECK(std::string(e.what()).find("version") != std::string::npos);
        }
    }
    SECTION("a file written with a different grid keeps its own grid") {
        const SpatialGrid g2 = make_spatial_grid(128, 20.0);
        const auto other = make_superposition(
            {MassChannel{1.0, 0.0, g2, gaussian_packet(g2, 0.0, 0.0, 1.0)}});
        const std::string path = (tmp.path / "other.mlsnap").string();
        save_snapshot(other, path);
        const Snapshot loaded = load_snapshot(path);
        const auto& back = std::get<SuperpositionState>(loaded);
        CHECK(back.grid() == g2);
        CHECK(back.grid().n == 128);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_snapshot((tmp.path / "nope.mlsnap").string()), snapshot_error);
    }
}

TEST_CASE("runner end to end") {
    SECTION("ep_check with g = 0 passes with fidelity 1") {
        const auto cfg = ScenarioConfig::parse(R"(
scenario = ep_check
[grid]
n = 128
L = 40
[physics]
masses = 1, 2
g = 0
[numerics]
dt = 1e-3
t_final = 0.02
)");
        const RunReport rep = run(cfg);
        CHECK(rep.pass());
        bool found = false;
        for (const auto& [k, v] : rep.metrics)
            if (k == "fidelity.t3_minus") {
                found = true;
                CHECK(std::stod(v) > 1.0 - 1e-9);
            }
        CHECK(found);
    }
    SECTION("bargmann scan table matches the closed-form law") {
        const auto cfg = ScenarioConfig::parse(R"(
scenario = bargmann_scan
[grid]
n = 128
L = 40
[physics]
masses = 1, 3
[numerics]
av_points = 20
)");
        const RunReport rep = run(cfg);
        CHECK(rep.pass());
        REQUIRE(rep.scan.size() == 20);
        for (const auto& p : rep.scan) {
            const double expect = std::pow(std::cos(p.av), 2);  // dm = 2, hbar = 1
            CHECK(std::abs(p.fidelity - expect) < 1e-10);
        }
    }
    SECTION("configured s-grid demands lattice-compatible masses") {
        const auto cfg = ScenarioConfig::parse(R"(
scenario = ep_check
[grid]
n = 128
L = 40
n_s = 8
L_s = 6.283185307179586
[physics]
masses = 1, 2.5
g = 0.5
[numerics]
dt = 1e-3
t_final = 0.02
)");
        try {
            run(cfg);
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("physics.masses") != std::string::npos);
        }
    }
    SECTION("missing dt is a config error naming the field") {
        const auto cfg = ScenarioConfig::parse(R"(
scenario = free_covariance
[grid]
n = 128
L = 40
[physics]
masses = 1
v = 1
[numerics]
t_final = 0.02
)");
        try {
            run(cfg);
            FAIL("expected config_error");
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find("numerics.dt") != std::string::npos);
        }
    }
    SECTION("deterministic: identical config, identical report") {
        const auto cfg = ScenarioConfig::parse(R"(
scenario = algebra_check
[grid]
n = 128
L = 40
n_s = 8
L_s = 6.283185307179586
[numerics]
probes = 5
)");
        const RunReport a = run(cfg);
        const RunReport b = run(cfg);
        CHECK(strip_timing(a.to_text()) == strip_timing(b.to_text()));
        CHECK(a.pass());
    }
    SECTION("free covariance small run passes") {
        const auto cfg = ScenarioConfig::parse(R"(
scenario = free_covariance
[grid]
n = 256
L = 40
[physics]
masses = 1, 2
v = 1
[numerics]
dt = 1e-3
t_final = 0.05
[tolerances]
residual = 1e-5
)");
        const RunReport rep = run(cfg);
        CHECK(rep.pass());
    }
    SECTION("poincare reduction") {
        const auto cfg = ScenarioConfig::parse(R"(
scenario = poincare_reduction
[physics]
masses = 1
v = 1
a = 1
p = 0.3
)");
        const RunReport rep = run(cfg);
        CHECK(rep.pass());
    }
}

TEST_CASE("run_to_files writes report, csv and snapshots") {
    TempDir tmp;
    const auto cfg = ScenarioConfig::parse(R"(
scenario = bargmann_scan
[grid]
n = 128
L = 40
[physics]
masses = 1, 3
[numerics]
av_points = 5
)");
    RunOptions options;
    options.out_dir = (tmp.path / "out").string();
    options.quiet = true;
    options.snapshots = true;
    CHECK(run_to_files(cfg, options) == 0);
    CHECK(fs::exists(tmp.path / "out" / "report.txt"));
    CHECK(fs::exists(tmp.path / "out" / "bargmann_scan.csv"));

    std::ifstream csv(tmp.path / "out" / "bargmann_scan.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "av,fidelity,predicted");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 5);
}

TEST_CASE("failing tolerance yields exit status 1 from run_to_files") {
    TempDir tmp;
    // demand an absurd residual bound so the check must fail
    const auto cfg = ScenarioConfig::parse(R"(
scenario = free_covariance
[grid]
n = 128
L = 40
[physics]
masses = 1
v = 1
[numerics]
dt = 1e-3
t_final = 0.02
[tolerances]
residual = 1e-30
)");
    RunOptions options;
    options.out_dir = (tmp.path / "out").string();
    options.quiet = true;
    CHECK(run_to_files(cfg, options) == 1);
    CHECK(fs::exists(tmp.path / "out" / "report.txt"));
}
