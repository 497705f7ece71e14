#include <doctest.h>

#include <string>

#include "diraclab/config.hpp"
#include "diraclab/report_io.hpp"

using namespace diraclab;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)parse_config(text, "test.ini");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  return {};
}

bool contains(const std::string& haystack, const std::string& needle) { return haystack.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("defaults and basic parsing") {
  const RunConfig c = parse_config(R"(
[model]
n_sites = 16
spacing = 0.5
mass = 2
lapse = cosine:0.25

[region]
sites = 2:6, 10
chi_width = 0

[scan]
beta_min = 0.5
beta_max = 2
n_points = 5
log_spaced = false
p_list = 1, 2
)");
  CHECK(c.model.n_sites == 16);
  CHECK(c.model.mass == 2.0);
  const SpinorLattice lattice = c.lattice();
  CHECK(lattice.lapse.size() == 16);
  CHECK(lattice.lapse[0] == doctest::Approx(1.25));
  CHECK(lattice.min_lapse() == doctest::Approx(0.75));
  const Region region = c.make_region(lattice);
  CHECK(region.sites() == std::vector<int>{2, 3, 4, 5, 10});
  CHECK_FALSE(region.chi().has_value());
  const std::vector<double> grid = c.beta_grid();
  REQUIRE(grid.size() == 5);
  CHECK(grid[1] == doctest::Approx(0.875));
  CHECK(c.scan.p_list == std::vector<double>{1.0, 2.0});
  CHECK(c.output.seed == 42);
}

TEST_CASE("malformed lapse array names the field and line") {
  const std::string msg = error_of("[model]\nn_sites = 4\nlapse = 1, 1, 1\n");
  CHECK(contains(msg, "[model] lapse"));
  CHECK(contains(msg, "test.ini:3"));
  CHECK(contains(msg, "3 entries"));
}

TEST_CASE("field diagnostics") {
  CHECK(contains(error_of("[model]\nspacing = -1\n"), "[model] spacing"));
  CHECK(contains(error_of("[model]\nn_sites = ten\n"), "expected an integer"));
  CHECK(contains(error_of("[model]\nlapse = 1, 0, 1, 1\nn_sites = 4\n"), "positive at every site"));
  CHECK(contains(error_of("[scan]\nbeta_min = 2\nbeta_max = 1\n"), "[scan] beta_max"));
  CHECK(contains(error_of("[scan]\nbogus = 1\n"), "unknown key"));
  CHECK(contains(error_of("[nope]\nx = 1\n"), "unknown section"));
  CHECK(contains(error_of("[check]\nsuites = car, nope\n"), "unknown suite"));
  CHECK(contains(error_of("[region]\nsites = 3:99\n"), "[region] sites"));
  CHECK(contains(error_of("[output]\nformats = xml\n"), "[output] formats"));
  CHECK(contains(error_of("[model]\nzero_modes = maybe\n"), "[model] zero_modes"));
  CHECK(contains(error_of("[model\nn_sites = 4\n"), "test.ini:1"));
}

TEST_CASE("canonical form round-trips and the hash is stable") {
  const RunConfig c = parse_config("[model]\nn_sites=12\nmass = 0.3\n[check]\nlambdas = 0.5,4\n");
  const RunConfig again = parse_config(c.canonical());
  CHECK(again.canonical() == c.canonical());
  CHECK(again.hash() == c.hash());
  const RunConfig other = parse_config("[model]\nn_sites=12\nmass = 0.30000000000000004\n[check]\nlambdas = 0.5,4\n");
  CHECK(other.hash() != c.hash());
  // Formatting differences that do not change values keep the hash.
  const RunConfig spaced = parse_config("; comment\n[check]\nlambdas=0.50, 4.0\n\n[model]\nmass=3e-1\nn_sites = 12\n");
  CHECK(spaced.hash() == c.hash());
}

TEST_CASE("double formatting is fixed at 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(1e21) == "1e+21");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("csv tables quote text and reject ragged rows") {
  CsvTable t({"name", "value", "count"});
  t.add_row({std::string("a,b"), 0.5, 3LL});
  t.add_row({std::string("say \"hi\""), 1.0, -1LL});
  CHECK(t.str() == "name,value,count\n\"a,b\",0.5,3\n\"say \"\"hi\"\"\",1,-1\n");
  CHECK_THROWS_AS(t.add_row({1.0}), Error);
}

TEST_CASE("nuclearity csv schema") {
  NuclearityReport r;
  r.p_list = {0.5, 1.0, 2.0};
  NuclearityPoint pt;
  pt.beta = 1.0;
  pt.singular_values = {0.5, 0.25};
  pt.det_bounds = {3.0, 1.875, 1.4};
  r.points.push_back(pt);
  const CsvTable t = nuclearity_csv(r);
  const std::vector<std::string> expected{"beta",   "s_trace_norm",    "t1",           "det_bound_p1", "nu_bound",
                                          "fit_residual", "det_bound_p0.5", "det_bound_p2", "envelope"};
  CHECK(t.header() == expected);
  CHECK(contains(t.str(), ",1.875,"));
}
