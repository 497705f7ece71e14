#include "diraclab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "diraclab/report_io.hpp"

namespace diraclab {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Maps "section.key" to its 1-based line in the source text.
std::map<std::string, int> key_lines(std::string_view text) {
  std::map<std::string, int> lines;
  std::string section;
  int lineno = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      lines.emplace(section, lineno);
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos) lines.emplace(section + "." + trim(std::string_view(t).substr(0, eq)), lineno);
  }
  return lines;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string source, std::map<std::string, int> lines)
      : tree_(tree), source_(std::move(source)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& message) const {
    const std::string path = key.empty() ? section : section + "." + key;
    const auto it = lines_.find(path);
    std::string where = source_;
    if (it != lines_.end()) where += ":" + std::to_string(it->second);
    const std::string field = key.empty() ? "[" + section + "]" : "[" + section + "] " + key;
    throw Error(ErrorCode::config, where + ": " + field + ": " + message);
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto value = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!value) return std::nullopt;
    return trim(*value);
  }

  double number(const std::string& section, const std::string& key, double fallback) const {
    const auto v = raw(section, key);
    return v ? parse_number(section, key, *v) : fallback;
  }

  int integer(const std::string& section, const std::string& key, int fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) fail(section, key, "expected an integer, got '" + *v + "'");
    return out;
  }

  std::uint64_t unsigned64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) {
      fail(section, key, "expected a non-negative integer, got '" + *v + "'");
    }
    return out;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail(section, key, "expected true or false, got '" + *v + "'");
  }

  std::string text(const std::string& section, const std::string& key, std::string fallback) const {
    return raw(section, key).value_or(std::move(fallback));
  }

  std::vector<double> numbers(const std::string& section, const std::string& key, std::vector<double> fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const std::string& item : split(*v, ',')) out.push_back(parse_number(section, key, item));
    return out;
  }

  std::vector<int> integers(const std::string& section, const std::string& key, std::vector<int> fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::vector<int> out;
    for (const std::string& item : split(*v, ',')) {
      int x = 0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
      if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
        fail(section, key, "expected a comma list of integers, bad entry '" + item + "'");
      }
      out.push_back(x);
    }
    return out;
  }

  std::vector<std::string> words(const std::string& section, const std::string& key,
                                 std::vector<std::string> fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::vector<std::string> out;
    for (std::string& item : split(*v, ',')) {
      if (!item.empty()) out.push_back(std::move(item));
    }
    return out;
  }

  double parse_number(const std::string& section, const std::string& key, const std::string& s) const {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out)) {
      fail(section, key, "expected a finite number, got '" + s + "'");
    }
    return out;
  }

 private:
  const pt::ptree& tree_;
  std::string source_;
  std::map<std::string, int> lines_;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"n_sites", "spacing", "mass", "lapse", "zero_modes"}},
      {"region", {"sites", "chi_width"}},
      {"scan", {"beta_min", "beta_max", "n_points", "log_spaced", "p_list", "s_power", "fit_t1_threshold",
                "window_factor"}},
      {"check", {"suites", "lambdas", "corrupt_theta", "refine_sites", "state", "state_beta", "perturb_rank",
                 "perturb_decay", "perturb_amplitude"}},
      {"output", {"directory", "formats", "seed"}},
  };
  return keys;
}

const std::set<std::string>& known_suites() {
  static const std::set<std::string> suites{"car",      "wick",   "coeff",     "det",     "ps",        "factor",
                                            "resolvent", "rescale", "quasiequiv", "nuclearity"};
  return suites;
}

std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_double(xs[i]);
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream out;
  for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
  return out.str();
}

/// Expands the lapse field into one value per site.
std::vector<double> expand_lapse(const std::string& spec, int n_sites, const Reader& r) {
  if (spec.rfind("cosine:", 0) == 0) {
    const double amp = r.parse_number("model", "lapse", trim(std::string_view(spec).substr(7)));
    std::vector<double> out(static_cast<std::size_t>(n_sites));
    for (int x = 0; x < n_sites; ++x) {
      out[static_cast<std::size_t>(x)] = 1.0 + amp * std::cos(2.0 * std::numbers::pi * x / n_sites);
    }
    return out;
  }
  if (spec == "flat") return std::vector<double>(static_cast<std::size_t>(n_sites), 1.0);
  const std::vector<std::string> items = split(spec, ',');
  std::vector<double> values;
  for (const std::string& item : items) values.push_back(r.parse_number("model", "lapse", item));
  if (values.size() == 1) return std::vector<double>(static_cast<std::size_t>(n_sites), values[0]);
  if (static_cast<int>(values.size()) != n_sites) {
    r.fail("model", "lapse",
           "array has " + std::to_string(values.size()) + " entries but n_sites = " + std::to_string(n_sites));
  }
  return values;
}

}  // namespace

RunConfig parse_config(std::string_view text, std::string source) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::config, source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  const Reader r(tree, source, key_lines(text));

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) r.fail("", section, "key outside a section");
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) r.fail(section, "", "unknown section");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) r.fail(section, key, "unknown key");
    }
  }

  RunConfig c;
  c.source = source;

  c.model.n_sites = r.integer("model", "n_sites", c.model.n_sites);
  if (c.model.n_sites < 2) r.fail("model", "n_sites", "must be at least 2");
  c.model.spacing = r.number("model", "spacing", c.model.spacing);
  if (!(c.model.spacing > 0.0)) r.fail("model", "spacing", "must be positive");
  c.model.mass = r.number("model", "mass", c.model.mass);
  if (c.model.mass < 0.0) r.fail("model", "mass", "must be non-negative");
  c.model.lapse = r.text("model", "lapse", c.model.lapse);
  const std::vector<double> lapse = expand_lapse(c.model.lapse, c.model.n_sites, r);
  if (*std::min_element(lapse.begin(), lapse.end()) <= 0.0) r.fail("model", "lapse", "must be positive at every site");
  const std::string policy = r.text("model", "zero_modes", "reject");
  if (policy == "reject") {
    c.model.zero_modes = ZeroModePolicy::reject;
  } else if (policy == "assign_lowest_first") {
    c.model.zero_modes = ZeroModePolicy::assign_lowest_first;
  } else {
    r.fail("model", "zero_modes", "expected reject or assign_lowest_first, got '" + policy + "'");
  }

  c.region.sites = r.text("region", "sites", c.region.sites);
  c.region.chi_width = r.integer("region", "chi_width", c.region.chi_width);
  if (c.region.chi_width < 0) r.fail("region", "chi_width", "must be non-negative");

  c.scan.beta_min = r.number("scan", "beta_min", c.scan.beta_min);
  c.scan.beta_max = r.number("scan", "beta_max", c.scan.beta_max);
  if (!(c.scan.beta_min > 0.0)) r.fail("scan", "beta_min", "must be positive");
  if (!(c.scan.beta_max > c.scan.beta_min)) r.fail("scan", "beta_max", "must exceed beta_min");
  c.scan.n_points = r.integer("scan", "n_points", c.scan.n_points);
  if (c.scan.n_points < 2) r.fail("scan", "n_points", "must be at least 2");
  c.scan.log_spaced = r.boolean("scan", "log_spaced", c.scan.log_spaced);
  c.scan.p_list = r.numbers("scan", "p_list", c.scan.p_list);
  for (double p : c.scan.p_list) {
    if (!(p > 0.0)) r.fail("scan", "p_list", "entries must be positive");
  }
  c.scan.s_power = r.integer("scan", "s_power", c.scan.s_power);
  if (c.scan.s_power < 1) r.fail("scan", "s_power", "must be at least 1");
  c.scan.fit_t1_threshold = r.number("scan", "fit_t1_threshold", c.scan.fit_t1_threshold);
  c.scan.window_factor = r.number("scan", "window_factor", c.scan.window_factor);

  c.check.suites = r.words("check", "suites", c.check.suites);
  for (const std::string& s : c.check.suites) {
    if (!known_suites().contains(s)) r.fail("check", "suites", "unknown suite '" + s + "'");
  }
  c.check.lambdas = r.numbers("check", "lambdas", c.check.lambdas);
  for (double l : c.check.lambdas) {
    if (!(l > 0.0)) r.fail("check", "lambdas", "entries must be positive");
  }
  c.check.corrupt_theta = r.boolean("check", "corrupt_theta", c.check.corrupt_theta);
  c.check.refine_sites = r.integers("check", "refine_sites", c.check.refine_sites);
  for (int n : c.check.refine_sites) {
    if (n < 2) r.fail("check", "refine_sites", "entries must be at least 2");
  }
  c.check.state = r.text("check", "state", c.check.state);
  if (c.check.state != "ground" && c.check.state != "thermal") {
    r.fail("check", "state", "expected ground or thermal, got '" + c.check.state + "'");
  }
  c.check.state_beta = r.number("check", "state_beta", c.check.state_beta);
  if (!(c.check.state_beta > 0.0)) r.fail("check", "state_beta", "must be positive");
  c.check.perturb_rank = r.integer("check", "perturb_rank", c.check.perturb_rank);
  c.check.perturb_decay = r.number("check", "perturb_decay", c.check.perturb_decay);
  c.check.perturb_amplitude = r.number("check", "perturb_amplitude", c.check.perturb_amplitude);

  c.output.directory = r.text("output", "directory", c.output.directory);
  c.output.formats = r.text("output", "formats", c.output.formats);
  if (c.output.formats != "csv" && c.output.formats != "json" && c.output.formats != "both") {
    r.fail("output", "formats", "expected csv, json or both, got '" + c.output.formats + "'");
  }
  c.output.seed = r.unsigned64("output", "seed", c.output.seed);

  // Region syntax is validated here so errors carry a line number.
  try {
    (void)c.make_region(c.lattice());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    r.fail("region", "sites", e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::config, path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

SpinorLattice RunConfig::lattice() const {
  SpinorLattice lattice = SpinorLattice::flat(model.n_sites, model.spacing);
  static const pt::ptree no_tree;
  const Reader dummy(no_tree, source, {});
  lattice.lapse = expand_lapse(model.lapse, model.n_sites, dummy);
  return lattice;
}

Region RunConfig::make_region(const SpinorLattice& lattice) const {
  Region base;
  if (region.sites == "half") {
    base = Region::half(lattice);
  } else if (region.sites == "all") {
    base = Region::full(lattice);
  } else if (region.sites == "none") {
    base = Region::empty(lattice);
  } else {
    std::vector<int> sites;
    for (const std::string& range : split(region.sites, ',')) {
      const auto colon = range.find(':');
      int first = 0;
      int last = 0;
      const auto parse = [&](std::string_view s, int& out) {
        const std::string t = trim(s);
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
        return !t.empty() && ec == std::errc() && ptr == t.data() + t.size();
      };
      if (colon == std::string::npos) {
        if (!parse(range, first)) throw Error(ErrorCode::config, source + ": [region] sites: bad entry '" + range + "'");
        last = first + 1;
      } else if (!parse(std::string_view(range).substr(0, colon), first) ||
                 !parse(std::string_view(range).substr(colon + 1), last)) {
        throw Error(ErrorCode::config, source + ": [region] sites: bad range '" + range + "'");
      }
      if (first < 0 || last > lattice.n_sites || first > last) {
        throw Error(ErrorCode::config,
                    source + ": [region] sites: range '" + range + "' outside [0, " + std::to_string(lattice.n_sites) + ")");
      }
      for (int s = first; s < last; ++s) sites.push_back(s);
    }
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    base = Region(lattice, std::move(sites));
  }
  return region.chi_width > 0 && !base.is_empty() ? base.with_smooth_chi(region.chi_width) : base;
}

std::vector<double> RunConfig::beta_grid() const {
  if (scan.log_spaced) return geometric_grid(scan.beta_min, scan.beta_max, scan.n_points);
  std::vector<double> out(static_cast<std::size_t>(scan.n_points));
  for (int i = 0; i < scan.n_points; ++i) {
    out[static_cast<std::size_t>(i)] = scan.beta_min + (scan.beta_max - scan.beta_min) * i / (scan.n_points - 1);
  }
  return out;
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  out << "[model]\n"
      << "n_sites = " << model.n_sites << "\n"
      << "spacing = " << format_double(model.spacing) << "\n"
      << "mass = " << format_double(model.mass) << "\n"
      << "lapse = " << model.lapse << "\n"
      << "zero_modes = " << (model.zero_modes == ZeroModePolicy::reject ? "reject" : "assign_lowest_first") << "\n\n"
      << "[region]\n"
      << "sites = " << region.sites << "\n"
      << "chi_width = " << region.chi_width << "\n\n"
      << "[scan]\n"
      << "beta_min = " << format_double(scan.beta_min) << "\n"
      << "beta_max = " << format_double(scan.beta_max) << "\n"
      << "n_points = " << scan.n_points << "\n"
      << "log_spaced = " << (scan.log_spaced ? "true" : "false") << "\n"
      << "p_list = " << join_numbers(scan.p_list) << "\n"
      << "s_power = " << scan.s_power << "\n"
      << "fit_t1_threshold = " << format_double(scan.fit_t1_threshold) << "\n"
      << "window_factor = " << format_double(scan.window_factor) << "\n\n"
      << "[check]\n"
      << "suites = " << join(check.suites) << "\n"
      << "lambdas = " << join_numbers(check.lambdas) << "\n"
      << "corrupt_theta = " << (check.corrupt_theta ? "true" : "false") << "\n"
      << "refine_sites = " << join(check.refine_sites) << "\n"
      << "state = " << check.state << "\n"
      << "state_beta = " << format_double(check.state_beta) << "\n"
      << "perturb_rank = " << check.perturb_rank << "\n"
      << "perturb_decay = " << format_double(check.perturb_decay) << "\n"
      << "perturb_amplitude = " << format_double(check.perturb_amplitude) << "\n\n"
      << "[output]\n"
      << "directory = " << output.directory << "\n"
      << "formats = " << output.formats << "\n"
      << "seed = " << output.seed << "\n";
  return out.str();
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace diraclab
