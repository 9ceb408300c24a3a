#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "muprobe/io.hpp"

using namespace muprobe;

TEST_CASE("format_double: shortest round trip") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(10.0) == "10");
    CHECK(format_double(-0.0) == "-0");
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    for (double v : {0.1, 1.0 / 3.0, 2.5885473723761363, 1e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("CsvTable") {
    CsvTable t({"a", "b"});
    t.add_row({"1", "x,y"});
    t.add_row({"say \"hi\"", "2"});
    CHECK(t.rows() == 2);
    CHECK(t.str() == "a,b\n1,\"x,y\"\n\"say \"\"hi\"\"\",2\n");
    CHECK_THROWS(t.add_row({"only one"}));
}

TEST_CASE("write_file_atomic creates directories and replaces content") {
    const auto dir = std::filesystem::temp_directory_path() / "muprobe_test_io";
    std::filesystem::remove_all(dir);
    const auto path = dir / "nested" / "f.txt";
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str() == "second");
    CHECK(std::distance(std::filesystem::directory_iterator(path.parent_path()), {}) == 1);

    write_json(dir / "j.json", nlohmann::json{{"b", 1}, {"a", 2}});
    std::ifstream js(dir / "j.json");
    std::stringstream jss;
    jss << js.rdbuf();
    CHECK(jss.str() == "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
    std::filesystem::remove_all(dir);
}
