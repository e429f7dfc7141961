#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "swexp/binning_simulator.hpp"
#include "swexp/errors.hpp"
#include "swexp/gallager_forney.hpp"
#include "swexp/source_model.hpp"
#include "swexp/tce_binary.hpp"
#include "swexp/tce_general.hpp"
#include "swexp/variable_rate.hpp"
#include "swexp/version.hpp"

namespace swexp::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Comma-separated values, or lo:hi:count for an inclusive uniform grid.
std::vector<double> parse_values(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw InvalidInput(flag + ": grid must be lo:hi:count");
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    const int count = std::stoi(parts[2]);
    if (count < 1) throw InvalidInput(flag + ": grid count must be positive");
    for (int i = 0; i < count; ++i) values.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return values;
  }
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) values.push_back(parse_number(part));
  if (values.empty()) throw InvalidInput(flag + ": no values given");
  return values;
}

struct SourceFlags {
  double bss = kNaN;
  std::string source_path;
  int alphabet = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--bss", bss, "binary symmetric pair with this crossover p");
    cmd->add_option("--source", source_path, "JSON joint source spec");
    cmd->add_option("--alphabet", alphabet,
                    "K-ary symmetric pair: P(x,y) = (1-p)/K on the diagonal, p/(K(K-1)) off it; p from --bss");
  }

  JointSource load(json& manifest) const {
    if (!source_path.empty()) {
      const std::string text = read_file(source_path);
      manifest["inputs"][source_path] = fnv1a64(text);
      return JointSource::from_json(text);
    }
    if (std::isnan(bss)) throw InvalidInput("one of --bss or --source is required");
    if (alphabet > 2) {
      if (!(bss > 0.0 && bss < 1.0)) throw InvalidInput("--bss must lie in (0,1)");
      const auto k = static_cast<std::size_t>(alphabet);
      std::vector<std::vector<double>> pmf(k, std::vector<double>(k));
      for (std::size_t x = 0; x < k; ++x)
        for (std::size_t y = 0; y < k; ++y)
          pmf[x][y] = x == y ? (1.0 - bss) / alphabet : bss / (alphabet * (alphabet - 1.0));
      return JointSource(pmf);
    }
    if (alphabet != 0 && alphabet != 2) throw InvalidInput("--alphabet must be at least 2");
    return BinarySymmetricPair(bss).joint();
  }
};

json base_manifest(const std::string& command) {
  json m;
  m["command"] = command;
  m["library_version"] = kLibraryVersion;
  m["csv_schema_version"] = kCsvSchemaVersion;
  m["parameters"] = json::object();
  m["inputs"] = json::object();
  m["master_seed"] = nullptr;
  m["outputs"] = json::array();
  return m;
}

void write_manifest(const json& manifest, const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write manifest '" + path.string() + "'");
  f << manifest.dump(2) << '\n';
}

fs::path default_dir() {
  const char* env = std::getenv("SWEXP_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

// Where a single-table command writes: --out, else $SWEXP_OUT_DIR/<name>.csv,
// else the `out` stream (manifest then only with --manifest).
class TableSink {
 public:
  TableSink(std::string out_flag, std::string manifest_flag, const std::string& command, std::ostream& out)
      : stream_(&out) {
    if (!out_flag.empty()) {
      path_ = out_flag;
    } else if (const char* env = std::getenv("SWEXP_OUT_DIR"); env && *env) {
      path_ = fs::path(env) / (command + ".csv");
    }
    if (!manifest_flag.empty())
      manifest_path_ = manifest_flag;
    else if (!path_.empty())
      manifest_path_ = fs::path(path_.string() + ".manifest.json");
  }

  // Writes the manifest, then opens the table.
  std::ostream& open(json& manifest) {
    if (!path_.empty()) {
      if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
      manifest["outputs"].push_back(path_.string());
    }
    if (!manifest_path_.empty()) write_manifest(manifest, manifest_path_);
    if (path_.empty()) return *stream_;
    file_ = std::make_unique<std::ofstream>(path_);
    if (!*file_) throw InvalidInput("cannot write '" + path_.string() + "'");
    return *file_;
  }

 private:
  std::ostream* stream_;
  fs::path path_;
  fs::path manifest_path_;
  std::unique_ptr<std::ofstream> file_;
};

void schema_line(std::ostream& os, const std::string& table) {
  os << "# swexp " << table << " v" << kCsvSchemaVersion << '\n';
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_number(v[i]);
  return s;
}

// ---- exponent ------------------------------------------------------------

struct ExponentFlags {
  std::string method = "gf";
  std::string which = "e1";
  std::string rates;
  std::string thresholds;
  std::string units = "nats";
  std::string out;
  std::string manifest;
  SourceFlags source;
};

int cmd_exponent(const ExponentFlags& f, std::ostream& out) {
  json manifest = base_manifest("exponent");
  const auto rates = parse_values(f.rates, "--R");
  const auto thresholds = parse_values(f.thresholds, "--T");
  manifest["parameters"] = {{"method", f.method}, {"exponent", f.which}, {"R", rates},
                            {"T", thresholds},    {"units", f.units},   {"bss", f.source.bss},
                            {"alphabet", f.source.alphabet}};
  if (f.method == "tce-binary" && std::isnan(f.source.bss))
    throw InvalidInput("--method tce-binary requires --bss");
  const JointSource src = f.source.load(manifest);
  const double scale = f.units == "bits" ? 1.0 / std::log(2.0) : 1.0;

  std::unique_ptr<GallagerForney> gf;
  std::unique_ptr<VariableRate> vr;
  std::unique_ptr<TypeEnumeration> te;
  if (f.method == "gf") gf = std::make_unique<GallagerForney>(src);
  if (f.method == "gf-variable") vr = std::make_unique<VariableRate>(src);
  if (f.method == "tce-general") te = std::make_unique<TypeEnumeration>(src);

  TableSink sink(f.out, f.manifest, "exponent", out);
  std::ostream& os = sink.open(manifest);
  schema_line(os, "exponent");
  os << "method,exponent,units,R,T,value,diverged,rho,s,detail\n";
  for (double R : rates) {
    for (double T : thresholds) {
      ExponentResult r;
      std::string detail;
      if (gf) {
        r = gf->e1(R, T);
      } else if (vr) {
        const auto v = vr->e1_tilde(R, T);
        r = v.exponent;
        detail = "r=" + join(v.rates.rates);
      } else if (te) {
        const auto t = te->e1_prime(R, T);
        r = t.exponent;
        detail = "py_prime=" + join(t.py_prime);
      } else {
        r = e1_prime_binary(f.source.bss, R, T);
      }
      if (f.which == "e2") r.value += T;
      os << f.method << ',' << f.which << ',' << f.units << ',' << format_number(R * scale) << ','
         << format_number(T * scale) << ',' << format_number(r.value * scale) << ',' << (r.diverged ? 1 : 0)
         << ',' << format_number(r.rho) << ',' << format_number(r.s) << ',' << detail << '\n';
    }
  }
  return kExitOk;
}

// ---- phase-diagram -------------------------------------------------------

struct PhaseFlags {
  double p = kNaN;
  double s_max = 3.0;
  int s_points = 121;
  int r_points = 101;
  std::string out_dir;
};

double l_at(double p, double R, double s) { return l_closed_form(p, R, s).l_value; }

int cmd_phase_diagram(const PhaseFlags& f, std::ostream& out) {
  if (!(f.p > 0.0 && f.p <= 0.5)) throw InvalidInput("--p must lie in (0, 1/2]");
  if (!(f.s_max > 1.0) || f.s_points < 2 || f.r_points < 2)
    throw InvalidInput("grid needs --s-max > 1 and at least 2 points per axis");
  const fs::path dir = f.out_dir.empty() ? default_dir() : fs::path(f.out_dir);
  fs::create_directories(dir);
  const double ln2 = std::log(2.0);
  const double p = f.p;

  json manifest = base_manifest("phase-diagram");
  manifest["parameters"] = {{"p", p}, {"s_max", f.s_max}, {"s_points", f.s_points}, {"R_points", f.r_points}};
  const char* names[] = {"phase_grid.csv", "phase_boundaries.csv", "phase_continuity.csv", "phase_diagram.gp"};
  for (const char* n : names) manifest["outputs"].push_back((dir / n).string());
  write_manifest(manifest, dir / "phase_diagram.manifest.json");

  std::map<char, int> counts;
  {
    std::ofstream os(dir / "phase_grid.csv");
    schema_line(os, "phase_grid");
    os << "s,R,region,delta_star,L\n";
    for (int i = 0; i < f.s_points; ++i) {
      const double s = f.s_max * i / (f.s_points - 1);
      for (int j = 0; j < f.r_points; ++j) {
        const double R = ln2 * j / (f.r_points - 1);
        const auto pt = l_closed_form(p, R, s);
        const char label = region_label(pt.region);
        ++counts[label];
        os << format_number(s) << ',' << format_number(R) << ',' << label << ',' << format_number(pt.delta_star)
           << ',' << format_number(pt.l_value) << '\n';
      }
    }
  }
  {
    std::ofstream os(dir / "phase_boundaries.csv");
    schema_line(os, "phase_boundaries");
    os << "s,h_p,h_ps,R_s\n";
    const int n = 4 * (f.s_points - 1) + 1;
    for (int i = 0; i < n; ++i) {
      const double s = f.s_max * i / (n - 1);
      os << format_number(s) << ',' << format_number(binary_entropy(p)) << ','
         << format_number(binary_entropy(tilted_crossover(p, s))) << ','
         << format_number(s > 1.0 && p < 0.5 ? exchange_rate(p, s) : kNaN) << '\n';
    }
  }
  {
    // L on both sides of each boundary, a hair away from it.
    std::ofstream os(dir / "phase_continuity.csv");
    schema_line(os, "phase_continuity");
    os << "boundary,s,R,L_below,L_above,abs_diff\n";
    const double eps = 1e-12;
    auto row = [&](const std::string& name, double s, double R, double below, double above) {
      os << name << ',' << format_number(s) << ',' << format_number(R) << ',' << format_number(below) << ','
         << format_number(above) << ',' << format_number(std::fabs(above - below)) << '\n';
    };
    for (int k = 1; k <= 9; ++k) {
      const double s_lo = k / 10.0;
      const double s_hi = 1.0 + (f.s_max - 1.0) * k / 10.0;
      const double hp = binary_entropy(p);
      double R = hp;
      row("C|B", s_lo, R, l_at(p, R - eps, s_lo), l_at(p, R + eps, s_lo));
      R = binary_entropy(tilted_crossover(p, s_lo));
      if (R < ln2 - eps) row("B|A", s_lo, R, l_at(p, R - eps, s_lo), l_at(p, R + eps, s_lo));
      row("E|D", s_hi, hp, l_at(p, hp - eps, s_hi), l_at(p, hp + eps, s_hi));
      if (p < 0.5) {
        R = exchange_rate(p, s_hi);
        row("F|E", s_hi, R, l_at(p, R - eps, s_hi), l_at(p, R + eps, s_hi));
      }
      R = binary_entropy(tilted_crossover(p, s_hi));
      if (R > eps) row("G|F", s_hi, R, l_at(p, R - eps, s_hi), l_at(p, R + eps, s_hi));
      R = ln2 * k / 10.0;
      row("s=1", 1.0, R, l_at(p, R, 1.0 - eps), l_at(p, R, 1.0 + eps));
    }
  }
  {
    std::ofstream os(dir / "phase_diagram.gp");
    os << "# gnuplot script: gnuplot phase_diagram.gp\n"
       << "set datafile separator ','\n"
       << "set terminal pngcairo size 900,600\n"
       << "set output 'phase_diagram.png'\n"
       << "set xlabel 's'\nset ylabel 'R [nats]'\n"
       << "set xrange [0:" << format_number(f.s_max) << "]\nset yrange [0:" << format_number(ln2) << "]\n"
       << "set title 'Phase diagram of L(R,s), p = " << format_number(p) << "'\n"
       << "set key outside\n"
       << "region(c) = (c eq 'A') ? 0 : (c eq 'B') ? 1 : (c eq 'C') ? 2 : (c eq 'D') ? 3 : "
          "(c eq 'E') ? 4 : (c eq 'F') ? 5 : 6\n"
       << "set palette maxcolors 7\nset cbrange [-0.5:6.5]\n"
       << "set cbtics ('A' 0, 'B' 1, 'C' 2, 'D' 3, 'E' 4, 'F' 5, 'G' 6)\n"
       << "set arrow from 1,0 to 1," << format_number(ln2) << " nohead dt 2 lw 2 front\n"
       << "plot 'phase_grid.csv' every ::2 using 1:2:(region(strcol(3))) with points pt 5 ps 0.5 "
          "palette notitle, \\\n"
       << "     'phase_boundaries.csv' every ::2 using 1:($1 <= 1 ? $2 : 1/0) with lines lw 2 lc "
          "'black' dt 1 title 'h(p), s<=1', \\\n"
       << "     '' every ::2 using 1:($1 <= 1 ? $3 : 1/0) with lines lw 2 lc 'black' dt 1 title "
          "'h(p_s), s<=1', \\\n"
       << "     '' every ::2 using 1:($1 > 1 ? $4 : 1/0) with lines lw 2 lc 'black' dt 1 title 'R(s)', \\\n"
       << "     '' every ::2 using 1:($1 > 1 ? $2 : 1/0) with lines lw 2 lc 'black' dt 2 title 'h(p), s>1', "
          "\\\n"
       << "     '' every ::2 using 1:($1 > 1 ? $3 : 1/0) with lines lw 2 lc 'black' dt 2 title "
          "'h(p_s), s>1'\n";
  }

  schema_line(out, "phase_regions");
  out << "region,grid_points\n";
  for (char c : std::string("ABCDEFG")) out << c << ',' << counts[c] << '\n';
  return kExitOk;
}

// ---- simulate ------------------------------------------------------------

struct SimulateFlags {
  std::string lengths;
  double rate = kNaN;
  double threshold = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string letter_rates;
  std::string out;
  std::string manifest;
  SourceFlags source;
};

int cmd_simulate(const SimulateFlags& f, std::ostream& out) {
  json manifest = base_manifest("simulate");
  std::vector<int> lengths;
  for (double v : parse_values(f.lengths, "--n")) {
    if (v != std::floor(v) || v < 1) throw InvalidInput("--n: block lengths must be positive integers");
    lengths.push_back(static_cast<int>(v));
  }
  if (std::isnan(f.rate) && f.letter_rates.empty()) throw InvalidInput("--R or --letter-rates is required");
  if (f.trials == 0) throw InvalidInput("--trials must be positive");
  manifest["parameters"] = {{"n", lengths},         {"R", f.rate},          {"T", f.threshold},
                            {"trials", f.trials},   {"workers", f.workers}, {"letter_rates", f.letter_rates},
                            {"bss", f.source.bss}, {"alphabet", f.source.alphabet}};
  manifest["master_seed"] = f.seed;
  const JointSource src = f.source.load(manifest);

  std::vector<SimConfig> configs;
  for (int n : lengths) {
    SimConfig cfg(src);
    cfg.n = n;
    cfg.threshold = f.threshold;
    cfg.trials = f.trials;
    cfg.master_seed = f.seed;
    cfg.workers = f.workers;
    if (!f.letter_rates.empty()) {
      cfg.letter_rates = parse_values(f.letter_rates, "--letter-rates");
      const auto px = marginal_x(src);
      double mean = 0.0;
      for (std::size_t x = 0; x < px.size(); ++x) mean += px[x] * cfg.letter_rates->at(x);
      cfg.rate = mean;
    } else {
      cfg.rate = f.rate;
    }
    cfg.validate();  // reject before any output is produced
    configs.push_back(cfg);
  }

  TableSink sink(f.out, f.manifest, "simulate", out);
  std::ostream& os = sink.open(manifest);
  schema_line(os, "simulate");
  os << "n,R_nominal,R_actual,T,trials,seed,e1_count,e2_count,erasure_count,mean_list_size\n";
  for (const auto& cfg : configs) {
    const auto batch = run_trials(cfg);
    os << cfg.n << ',' << format_number(cfg.rate) << ','
       << format_number(cfg.letter_rates ? cfg.rate : cfg.actual_rate()) << ',' << format_number(cfg.threshold)
       << ',' << batch.trials << ',' << batch.seed << ',' << batch.e1_count << ',' << batch.e2_count << ','
       << batch.erasure << ',' << format_number(batch.mean_list_size()) << '\n';
  }
  return kExitOk;
}

// ---- compare -------------------------------------------------------------

struct Table {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw InvalidInput("schema mismatch in '" + path + "': missing column '" + name + "'");
  }
};

Table read_table(const std::string& path, json& manifest) {
  const std::string text = read_file(path);
  manifest["inputs"][path] = fnv1a64(text);
  Table t;
  t.path = path;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (t.header.empty()) {
      t.header = cells;
    } else {
      if (cells.size() != t.header.size())
        throw InvalidInput("schema mismatch in '" + path + "': row has " + std::to_string(cells.size()) +
                           " cells, header has " + std::to_string(t.header.size()));
      t.rows.push_back(cells);
    }
  }
  if (t.header.empty()) throw InvalidInput("'" + path + "' has no header row");
  return t;
}

struct CompareFlags {
  std::string sim;
  std::string exponents;
  std::string out;
  std::string manifest;
};

int cmd_compare(const CompareFlags& f, std::ostream& out) {
  json manifest = base_manifest("compare");
  manifest["parameters"] = {{"sim", f.sim}, {"exponent", f.exponents}};
  const Table sim = read_table(f.sim, manifest);
  const Table ex = read_table(f.exponents, manifest);
  const auto c_n = sim.column("n"), c_r = sim.column("R_nominal"), c_t = sim.column("T"),
             c_trials = sim.column("trials"), c_e1 = sim.column("e1_count"), c_e2 = sim.column("e2_count");
  const auto x_method = ex.column("method"), x_which = ex.column("exponent"), x_units = ex.column("units"),
             x_r = ex.column("R"), x_t = ex.column("T"), x_value = ex.column("value");

  TableSink sink(f.out, f.manifest, "compare", out);
  std::ostream& os = sink.open(manifest);
  schema_line(os, "compare");
  os << "method,exponent,R,T,bound,slope,ci,status\n";
  int compared = 0;
  bool failed = false;
  for (const auto& xr : ex.rows) {
    const double scale = xr[x_units] == "bits" ? std::log(2.0) : 1.0;
    const double R = parse_number(xr[x_r]) * scale;
    const double T = parse_number(xr[x_t]) * scale;
    const double bound = parse_number(xr[x_value]) * scale;
    const std::string which = xr[x_which];
    if (which != "e1" && which != "e2") continue;
    std::vector<RatePoint> points;
    for (const auto& sr : sim.rows) {
      if (std::fabs(parse_number(sr[c_r]) - R) > 1e-9 || std::fabs(parse_number(sr[c_t]) - T) > 1e-9) continue;
      RatePoint pt;
      pt.n = std::stoi(sr[c_n]);
      pt.trials = std::stoull(sr[c_trials]);
      pt.rate = static_cast<double>(std::stoull(sr[which == "e1" ? c_e1 : c_e2])) / static_cast<double>(pt.trials);
      points.push_back(pt);
    }
    if (points.size() < 3) continue;
    ++compared;
    std::string status;
    double slope = kNaN, ci = kNaN;
    try {
      const auto fit = empirical_exponent(points);
      slope = fit.slope;
      ci = fit.ci;
      status = slope >= bound - ci ? "pass" : "fail";
    } catch (const DegenerateData& d) {
      slope = d.exponent_lower_bound();
      status = slope >= bound ? "pass" : "inconclusive";
    }
    if (status == "fail") failed = true;
    os << xr[x_method] << ',' << which << ',' << format_number(R) << ',' << format_number(T) << ','
       << format_number(bound) << ',' << format_number(slope) << ',' << format_number(ci) << ',' << status
       << '\n';
  }
  if (compared == 0)
    throw InvalidInput("no exponent row matches a (R_nominal, T) group with at least 3 block lengths");
  return failed ? kExitCompareFailed : kExitOk;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

double parse_number(const std::string& text) {
  if (text == "inf" || text == "+inf") return kInf;
  if (text == "-inf") return -kInf;
  if (text == "nan") return kNaN;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidInput("not a number: '" + text + "'");
  }
  if (used != text.size()) throw InvalidInput("not a number: '" + text + "'");
  return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-binning erasure/list error exponents and simulation"};
  app.require_subcommand(1);

  ExponentFlags ef;
  auto* exponent = app.add_subcommand("exponent", "compute an exponent over R and T values");
  exponent->add_option("--method", ef.method)->check(CLI::IsMember({"gf", "gf-variable", "tce-binary", "tce-general"}));
  exponent->add_option("--exponent", ef.which, "e1 or e2 = e1 + T")->check(CLI::IsMember({"e1", "e2"}));
  exponent->add_option("--R", ef.rates, "rates: a,b,c or lo:hi:count")->required();
  exponent->add_option("--T", ef.thresholds, "thresholds: a,b,c or lo:hi:count")->required();
  exponent->add_option("--units", ef.units, "display units")->check(CLI::IsMember({"nats", "bits"}));
  exponent->add_option("--out", ef.out);
  exponent->add_option("--manifest", ef.manifest);
  ef.source.add_to(exponent);

  PhaseFlags pf;
  auto* phase = app.add_subcommand("phase-diagram", "region-labelled (s,R) grid, boundaries and plot script");
  phase->add_option("--p", pf.p)->required();
  phase->add_option("--s-max", pf.s_max);
  phase->add_option("--s-points", pf.s_points);
  phase->add_option("--R-points", pf.r_points);
  phase->add_option("--out-dir", pf.out_dir, "default: $SWEXP_OUT_DIR or .");

  SimulateFlags sf;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo random binning with the threshold decoder");
  simulate->add_option("--n", sf.lengths, "block lengths: a,b,c")->required();
  simulate->add_option("--R", sf.rate);
  simulate->add_option("--T", sf.threshold);
  simulate->add_option("--trials", sf.trials)->required();
  simulate->add_option("--seed", sf.seed);
  simulate->add_option("--workers", sf.workers);
  simulate->add_option("--letter-rates", sf.letter_rates, "variable-rate mode: r(x) per X symbol");
  simulate->add_option("--out", sf.out);
  simulate->add_option("--manifest", sf.manifest);
  sf.source.add_to(simulate);

  CompareFlags cf;
  auto* compare = app.add_subcommand("compare", "fitted simulation slopes against computed exponents");
  compare->add_option("--sim", cf.sim)->required();
  compare->add_option("--exponent", cf.exponents)->required();
  compare->add_option("--out", cf.out);
  compare->add_option("--manifest", cf.manifest);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  try {
    if (*exponent) return cmd_exponent(ef, out);
    if (*phase) return cmd_phase_diagram(pf, out);
    if (*simulate) return cmd_simulate(sf, out);
    return cmd_compare(cf, out);
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitResourceCap;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
}

}  // namespace swexp::cli
