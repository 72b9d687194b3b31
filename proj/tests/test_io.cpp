#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "vacant/io.hpp"

using namespace vacant;

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
    CHECK(format_number(6.02e23) == "6.02e+23");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv table") {
    CsvTable t({"seed", "t", "ratio", "method"});
    t.add_row({std::uint64_t{3}, 20.0, 1.0 / 7.0, std::string("wos")});
    t.add_row({std::int64_t{-1}, 1e-3, std::numeric_limits<double>::infinity(), std::string("ball")});
    std::ostringstream os;
    t.write(os);
    CHECK(os.str() == "seed,t,ratio,method\n3,20,0.1428571429,wos\n-1,0.001,inf,ball\n");
    CHECK(t.rows() == 2);
    CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
}

TEST_CASE("key value config") {
    std::istringstream is(
        "# comment line\n"
        "d = 3\n"
        "t_values = 5, 10 ,20   # trailing comment\n"
        "\n"
        "method=wos\n"
        "eps = 5e-2\n");
    const KeyValueConfig c = KeyValueConfig::parse(is);
    CHECK(c.integer("d", 0) == 3);
    CHECK(c.numbers("t_values", {}) == std::vector<double>{5, 10, 20});
    CHECK(c.text("method", "") == "wos");
    CHECK(c.number("eps", 0) == 0.05);
    CHECK(c.number("missing", 1.5) == 1.5);
    CHECK_FALSE(c.has("missing"));
    CHECK_NOTHROW(c.check_known({"d", "t_values", "method", "eps"}));
    CHECK_THROWS_AS(c.check_known({"d", "t_values", "method"}), ConfigError);
    CHECK_THROWS_AS(c.integer("eps", 0), ConfigError);
    CHECK_THROWS_AS(c.number("method", 0), ConfigError);

    auto parse = [](const char* s) {
        std::istringstream in(s);
        return KeyValueConfig::parse(in);
    };
    CHECK_THROWS_AS(parse("d 3\n"), ConfigError);
    CHECK_THROWS_AS(parse("= 3\n"), ConfigError);
    CHECK_THROWS_AS(parse("d = 3\nd = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse("x = 3abc\n").number("x", 0), ConfigError);
    CHECK_THROWS_AS(parse("x = ,\n").numbers("x", {}), ConfigError);
    CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("json reports") {
    CapacityEstimate e = cap_ball(0.5, Dim(3));
    const json j = e;
    CHECK(j["value"].get<double>() == doctest::Approx(M_PI));
    CHECK(j.contains("stderr"));
    CHECK(j.contains("method"));

    CensusReport r;
    r.d = 3;
    r.n = 8;
    ComponentRecord rec;
    rec.bbox_lo = IVec::Zero(3);
    rec.bbox_hi = IVec::Ones(3);
    rec.wraps = true;
    rec.diameter = std::numeric_limits<double>::quiet_NaN();
    r.components.push_back(rec);
    const json jr = r;
    CHECK(jr["components"] == 1);
    CHECK(jr["kappa_star"].is_null());
    CHECK(jr["records"][0]["diameter"].is_null());
    CHECK(jr["records"][0]["bbox_hi"] == json::array({1, 1, 1}));
    // keys keep insertion order
    CHECK(jr.begin().key() == "d");
}

TEST_CASE("path checkpoints round trip") {
    SimConfig cfg;
    cfg.d = 4;
    cfg.seed = 0xdeadbeefcafeULL;
    PathWalker::State s;
    s.step = 123456789;
    s.time = 0.1 + 0.2;
    s.position = Vec(4);
    s.position << 0.1, 1.0 / 3.0, 0.999999999999, 0.0;
    std::stringstream buf;
    write_path_checkpoint(buf, cfg, s);
    CHECK(buf.str().size() == 4 + 4 + 4 + 8 + 8 + 8 + 4 * 8);
    const PathWalker::State back = read_path_checkpoint(buf, cfg);
    CHECK(back.step == s.step);
    CHECK(back.time == s.time);
    CHECK(back.position == s.position);

    std::stringstream again;
    write_path_checkpoint(again, cfg, s);
    SimConfig other = cfg;
    other.seed = 1;
    CHECK_THROWS(read_path_checkpoint(again, other));
    std::stringstream cut(buf.str().substr(0, 20));
    CHECK_THROWS(read_path_checkpoint(cut, cfg));
}
