#include <doctest.h>

#include <cmath>
#include <fstream>

#include "idtraj/csv.hpp"
#include "idtraj/errors.hpp"
#include "support/fsutil.hpp"

using namespace idtraj;
using idtraj::testing::TempDir;
using idtraj::testing::slurp;

TEST_SUITE("csv") {

TEST_CASE("writer and reader round trip") {
    TempDir tmp;
    const auto path = tmp / "t.csv";
    {
        CsvWriter w(path, {"a", "b"});
        w.write_row({"1", "x"});
        w.write_row({"2.5", "y"});
        w.close();
    }
    CHECK(slurp(path) == "a,b\n1,x\n2.5,y\n");

    const CsvTable t = read_csv(path);
    REQUIRE(t.header.size() == 2);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][0] == "2.5");
    CHECK(t.column("b") == 1);
    CHECK(t.column("missing") == -1);
    CHECK(t.require_column("a") == 0);
    CHECK_THROWS_AS(t.require_column("missing"), DataError);

    CHECK_NOTHROW(read_csv(path, {"a", "b"}));
    CHECK_THROWS_AS(read_csv(path, {"a", "c"}), DataError);
}

TEST_CASE("writer rejects ragged rows") {
    TempDir tmp;
    CsvWriter w(tmp / "t.csv", {"a", "b"});
    CHECK_THROWS_AS(w.write_row({"only-one"}), ContractError);
}

TEST_CASE("reader rejects ragged and missing files") {
    TempDir tmp;
    {
        CsvWriter w(tmp / "ragged.csv", {"a", "b"});
        w.close();
    }
    std::ofstream(tmp / "ragged.csv", std::ios::app) << "1,2,3\n";
    CHECK_THROWS_AS(read_csv(tmp / "ragged.csv"), DataError);
    CHECK_THROWS_AS(read_csv(tmp / "absent.csv"), DataError);
}

TEST_CASE("numeric parsing") {
    CHECK(parse_double("2.5") == 2.5);
    CHECK(parse_double("-1e-3") == -1e-3);
    CHECK(parse_long("42") == 42);
    CHECK(parse_long("-7") == -7);
    CHECK_THROWS_AS(parse_double("abc"), InputError);
    CHECK_THROWS_AS(parse_double(""), InputError);
    CHECK_THROWS_AS(parse_double("1.5x"), InputError);
    CHECK_THROWS_AS(parse_long("1.5"), InputError);
    CHECK(std::isnan(parse_double("nan")));
}

TEST_CASE("format_double round trips bit-exactly") {
    for (double v : {0.1, 1.0 / 3.0, -12345.6789, 1e-300, 2.9, 37.1, 0.0}) {
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(2.5) == "2.5");
    CHECK(format_double(1.0) == "1");
}

}  // TEST_SUITE
