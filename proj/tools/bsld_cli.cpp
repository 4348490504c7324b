// Command-line front end over the C API: builds domains, partitions,
// pressure/spectrum curves and deviation experiments, and writes each
// artifact set with a JSON manifest of content digests. `--check-manifest
// FILE` replays the recorded command into a scratch directory and verifies
// that every output digest reproduces.
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bsld.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// C-API failure carrying the module error name for the exit-3 report.
struct ApiError {
  std::string name;
  std::string message;
};

void check(bsld_status st) {
  if (st != BSLD_OK) throw ApiError{bsld_last_error_name(), bsld_last_error()};
}

struct Domain {
  bsld_domain* h = nullptr;
  ~Domain() { bsld_domain_free(h); }
};

struct Partition {
  bsld_partition* h = nullptr;
  ~Partition() { bsld_partition_free(h); }
};

struct Pressure {
  bsld_pressure* h = nullptr;
  ~Pressure() { bsld_pressure_free(h); }
};

struct Spectrum {
  bsld_spectrum* h = nullptr;
  ~Spectrum() { bsld_spectrum_free(h); }
};

void make_domain(const std::string& group, const std::string& file, Domain& out) {
  if (!file.empty())
    check(bsld_domain_load(file.c_str(), &out.h));
  else if (group == "octagon")
    check(bsld_domain_octagon(&out.h));
  else
    check(bsld_domain_quadrilateral(&out.h));
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ApiError{"BadArgument", "cannot open " + path.string()};
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << int(digest[i]);
  return hex.str();
}

// Shared state filled by CLI11; one artifact run writes its outputs and a
// manifest listing their digests.
struct Ctx {
  std::vector<std::string> args;  // original command line, for replay
  std::string group = "octagon";
  std::string domain_file;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int depth = 20;
  int count = 10;
  double k_radius = -1.0;
  double beta = std::nan("");
  double alpha = std::nan("");
  int grid = 81;
  long long samples = 100000;
  std::string method = "mc";
  std::vector<double> alpha_list;
  std::vector<int> n_list;
};

void write_manifest(const Ctx& ctx, const std::string& command,
                    const std::vector<fs::path>& outputs, double wall_s) {
  json m;
  m["command"] = command;
  m["args"] = ctx.args;
  m["group"] = ctx.domain_file.empty() ? ctx.group : "file";
  if (!ctx.domain_file.empty()) {
    m["domain_file"] = ctx.domain_file;
    m["domain_file_sha256"] = sha256_file(ctx.domain_file);
  }
  m["seed"] = ctx.seed;
  m["tool_version"] = kVersion;
  m["wall_time_s"] = wall_s;
  json digests = json::object();
  for (const fs::path& p : outputs) digests[p.filename().string()] = sha256_file(p);
  m["outputs"] = digests;
  fs::path path = fs::path(ctx.out_dir) / (command + "_manifest.json");
  std::ofstream(path) << m.dump(2) << "\n";
  std::cout << "manifest: " << path.string() << "\n";
}

std::ofstream open_csv(const Ctx& ctx, const std::string& name,
                       std::vector<fs::path>& outputs) {
  fs::create_directories(ctx.out_dir);
  fs::path path = fs::path(ctx.out_dir) / name;
  outputs.push_back(path);
  std::ofstream out(path);
  out << std::setprecision(17);
  return out;
}

// -- subcommand bodies ------------------------------------------------------

void cmd_group_validate(const Ctx& ctx) {
  Domain dom;
  make_domain(ctx.group, ctx.domain_file, dom);
  check(bsld_domain_validate(dom.h));
  int sides = 0, cusps = 0;
  check(bsld_domain_num_sides(dom.h, &sides));
  check(bsld_domain_has_cusps(dom.h, &cusps));
  std::cout << "sides: " << sides << "\n"
            << "cusps: " << (cusps ? "yes" : "no") << "\n"
            << "side pairing: ok\n"
            << "even corners: ok\n"
            << "admissible: ok\n";
}

void cmd_bsmap_show(const Ctx& ctx) {
  Domain dom;
  make_domain(ctx.group, ctx.domain_file, dom);
  Partition part;
  check(bsld_partition_build(dom.h, &part.h));
  int branches = 0, cells = 0;
  check(bsld_map_num_branches(part.h, &branches));
  check(bsld_partition_size(part.h, &cells));
  std::cout << std::setprecision(17) << "branches: " << branches
            << "\ncells: " << cells << "\n";
  for (int i = 0; i < branches; ++i) {
    double lo = 0, len = 0;
    int idx = 0, bar = 0;
    check(bsld_map_branch(part.h, i, &lo, &len, &idx, &bar));
    std::cout << "branch " << i << ": label " << (bar ? "E" : "e") << idx
              << " arc [" << lo << ", +" << len << ")\n";
  }
}

void cmd_partition_export(const Ctx& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  Domain dom;
  make_domain(ctx.group, ctx.domain_file, dom);
  Partition part;
  check(bsld_partition_build(dom.h, &part.h));
  char* text = nullptr;
  check(bsld_partition_json(part.h, &text));
  std::vector<fs::path> outputs;
  {
    std::ofstream out = open_csv(ctx, "partition.json", outputs);
    out << text << "\n";
  }
  bsld_string_free(text);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(ctx, "partition_export", outputs, wall);
}

void cmd_geodesic_cutseq(const Ctx& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  Domain dom;
  make_domain(ctx.group, ctx.domain_file, dom);
  std::vector<double> src(static_cast<size_t>(ctx.count)),
      dst(static_cast<size_t>(ctx.count));
  check(bsld_geodesic_sample(dom.h, ctx.seed, ctx.k_radius, ctx.count,
                             src.data(), dst.data()));
  std::vector<fs::path> outputs;
  std::ofstream out = open_csv(ctx, "cutseq.csv", outputs);
  out << "geodesic,src_theta,dst_theta,n,side,deformed,t_n,s_n,u_n\n";
  const int n = ctx.depth;
  std::vector<int> sides(static_cast<size_t>(n)), deformed(static_cast<size_t>(n));
  std::vector<double> t(static_cast<size_t>(n) + 1), s(static_cast<size_t>(n) + 1),
      u(static_cast<size_t>(n) + 1);
  for (int i = 0; i < ctx.count; ++i) {
    check(bsld_geodesic_trace(dom.h, src[static_cast<size_t>(i)],
                              dst[static_cast<size_t>(i)], n, sides.data(),
                              deformed.data(), t.data(), s.data(), u.data()));
    for (int k = 0; k < n; ++k) {
      out << i << ',' << src[static_cast<size_t>(i)] << ','
          << dst[static_cast<size_t>(i)] << ',' << (k + 1) << ','
          << sides[static_cast<size_t>(k)] << ',' << deformed[static_cast<size_t>(k)]
          << ',' << t[static_cast<size_t>(k) + 1] << ',' << s[static_cast<size_t>(k) + 1]
          << ',' << u[static_cast<size_t>(k) + 1] << "\n";
    }
  }
  out.close();
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(ctx, "geodesic_cutseq", outputs, wall);
}

void cmd_pressure_compute(const Ctx& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  Domain dom;
  make_domain(ctx.group, ctx.domain_file, dom);
  Partition part;
  check(bsld_partition_build(dom.h, &part.h));
  Pressure press;
  check(bsld_pressure_compute(part.h, &press.h));
  std::vector<fs::path> outputs;
  std::ofstream out = open_csv(ctx, "pressure.csv", outputs);
  out << "beta,P_inf,P_sup,P_hat\n";
  int npts = 0;
  check(bsld_pressure_num_points(press.h, &npts));
  int nearest = -1;
  double best = 1e300;
  for (int i = 0; i < npts; ++i) {
    double beta, p_hat, lo, hi;
    int has;
    check(bsld_pressure_point(press.h, i, &beta, &p_hat, &has, &lo, &hi));
    if (has)
      out << beta << ',' << lo << ',' << hi << ',' << p_hat << "\n";
    else
      out << beta << ",nan,nan," << p_hat << "\n";
    if (!std::isnan(ctx.beta) && std::abs(beta - ctx.beta) < best) {
      best = std::abs(beta - ctx.beta);
      nearest = i;
    }
  }
  out.close();
  if (nearest >= 0) {
    double beta, p_hat, lo, hi;
    int has;
    check(bsld_pressure_point(press.h, nearest, &beta, &p_hat, &has, &lo, &hi));
    std::cout << std::setprecision(17) << beta << ',';
    if (has)
      std::cout << lo << ',' << hi << ',';
    else
      std::cout << "nan,nan,";
    std::cout << p_hat << "\n";
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(ctx, "pressure_compute", outputs, wall);
}

void cmd_spectrum_compute(const Ctx& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  Domain dom;
  make_domain(ctx.group, ctx.domain_file, dom);
  Partition part;
  check(bsld_partition_build(dom.h, &part.h));
  Pressure press;
  check(bsld_pressure_compute(part.h, &press.h));
  Spectrum spec;
  check(bsld_spectrum_compute(press.h, ctx.grid, &spec.h));
  std::vector<fs::path> outputs;
  std::ofstream out = open_csv(ctx, "spectrum.csv", outputs);
  out << "alpha,beta_of_alpha,b,I,I_prime\n";
  int npts = 0;
  check(bsld_spectrum_num_points(spec.h, &npts));
  for (int i = 0; i < npts; ++i) {
    double alpha, beta, b, rate, rate_prime;
    check(bsld_spectrum_point(spec.h, i, &alpha, &beta, &b, &rate, &rate_prime));
    out << alpha << ',' << beta << ',' << b << ',' << rate << ',' << rate_prime
        << "\n";
  }
  out.close();
  double ag = 0;
  check(bsld_spectrum_alpha_typical(spec.h, &ag));
  std::cout << std::setprecision(17) << "alpha_typical: " << ag << "\n";
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(ctx, "spectrum_compute", outputs, wall);
}

void cmd_ldp_simulate(const Ctx& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  if (ctx.alpha_list.empty() || ctx.n_list.empty())
    throw CLI::ValidationError("ldp simulate needs --alpha-list and --n-list");
  Domain dom;
  make_domain(ctx.group, ctx.domain_file, dom);
  Partition part;
  check(bsld_partition_build(dom.h, &part.h));
  std::vector<fs::path> outputs;
  if (ctx.method == "mc" || ctx.method == "both") {
    std::ofstream out = open_csv(ctx, "ldp_mc.csv", outputs);
    out << "alpha,n,m_hat,se,slope,slope_ok\n";
    for (double alpha : ctx.alpha_list) {
      std::vector<double> m_hat(ctx.n_list.size()), se(ctx.n_list.size());
      double slope = 0;
      int slope_ok = 0;
      check(bsld_tail_mc(part.h, alpha, 1, ctx.n_list.data(),
                         static_cast<int>(ctx.n_list.size()), ctx.samples,
                         ctx.seed, m_hat.data(), se.data(), &slope, &slope_ok));
      for (size_t i = 0; i < ctx.n_list.size(); ++i)
        out << alpha << ',' << ctx.n_list[i] << ',' << m_hat[i] << ',' << se[i]
            << ',' << slope << ',' << slope_ok << "\n";
    }
  }
  if (ctx.method == "cylinder" || ctx.method == "both") {
    std::ofstream out = open_csv(ctx, "ldp_cylinder.csv", outputs);
    out << "alpha,n,mass,rate\n";
    for (double alpha : ctx.alpha_list) {
      for (int n : ctx.n_list) {
        double mass = 0;
        check(bsld_tail_cylinder(part.h, alpha, n, &mass));
        double rate = mass > 0.0
                          ? -std::log(mass / 6.283185307179586) / n
                          : std::numeric_limits<double>::infinity();
        out << alpha << ',' << n << ',' << mass << ',' << rate << "\n";
      }
    }
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(ctx, "ldp_simulate", outputs, wall);
}

void cmd_er_law(const Ctx& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  if (std::isnan(ctx.alpha))
    throw CLI::ValidationError("er-law needs --alpha");
  Domain dom;
  make_domain(ctx.group, ctx.domain_file, dom);
  Partition part;
  check(bsld_partition_build(dom.h, &part.h));
  Pressure press;
  check(bsld_pressure_compute(part.h, &press.h));
  double beta = 0, b = 0, rate = 0;
  check(bsld_legendre_eval(press.h, ctx.alpha, &beta, &b, &rate));
  std::vector<double> stats(static_cast<size_t>(ctx.count));
  check(bsld_er_statistic(dom.h, ctx.seed, ctx.k_radius, ctx.count, ctx.depth,
                          rate, stats.data()));
  std::vector<fs::path> outputs;
  std::ofstream out = open_csv(ctx, "er_law.csv", outputs);
  out << "geodesic,statistic,predicted\n";
  const double predicted = 1.0 / (1.0 - b);
  double mean = 0;
  for (int i = 0; i < ctx.count; ++i) {
    out << i << ',' << stats[static_cast<size_t>(i)] << ',' << predicted << "\n";
    mean += stats[static_cast<size_t>(i)];
  }
  out.close();
  mean /= ctx.count;
  std::cout << std::setprecision(17) << "alpha: " << ctx.alpha
            << "\nrate: " << rate << "\npredicted: " << predicted
            << "\nmean_statistic: " << mean << "\n";
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(ctx, "er_law", outputs, wall);
}

int run(const std::vector<std::string>& args);

// Replays the command recorded in a manifest into a scratch directory and
// verifies that every listed output reproduces its digest.
int check_manifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    std::cerr << "cannot open manifest " << manifest_path << "\n";
    return 2;
  }
  json m;
  in >> m;
  std::vector<std::string> args = m["args"].get<std::vector<std::string>>();
  fs::path scratch =
      fs::temp_directory_path() /
      ("bsld_replay_" + std::to_string(std::random_device{}()));
  for (size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--out") args[i + 1] = scratch.string();
  if (std::find(args.begin(), args.end(), "--out") == args.end()) {
    args.push_back("--out");
    args.push_back(scratch.string());
  }
  int rc = run(args);
  if (rc != 0) {
    std::cerr << "replay failed with exit code " << rc << "\n";
    fs::remove_all(scratch);
    return 3;
  }
  bool ok = true;
  for (const auto& [name, digest] : m["outputs"].items()) {
    fs::path replayed = scratch / name;
    std::string got = fs::exists(replayed) ? sha256_file(replayed) : "missing";
    bool match = got == digest.get<std::string>();
    std::cout << name << ": " << (match ? "ok" : "MISMATCH") << "\n";
    ok = ok && match;
  }
  fs::remove_all(scratch);
  return ok ? 0 : 3;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Boundary-map toolkit for Fuchsian groups"};
  app.require_subcommand(0, 1);

  Ctx ctx;
  ctx.args = args;
  if (const char* env = std::getenv("BSLD_OUT_DIR")) ctx.out_dir = env;

  std::string manifest_to_check;
  app.add_option("--check-manifest", manifest_to_check,
                 "replay a recorded run and verify output digests");

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--group", ctx.group, "built-in group id")
        ->check(CLI::IsMember({"octagon", "quad"}));
    cmd->add_option("--domain-file", ctx.domain_file,
                    "JSON fundamental-domain description");
    cmd->add_option("--out", ctx.out_dir, "output directory");
  };

  CLI::App* group = app.add_subcommand("group", "fundamental domain checks");
  CLI::App* validate = group->add_subcommand("validate", "run admissibility checks");
  add_common(validate);

  CLI::App* bsmap = app.add_subcommand("bsmap", "boundary map inspection");
  CLI::App* show = bsmap->add_subcommand("show", "print branch table");
  add_common(show);

  CLI::App* partc = app.add_subcommand("partition", "Markov partition tools");
  CLI::App* pexport = partc->add_subcommand("export", "write partition JSON");
  add_common(pexport);

  CLI::App* geo = app.add_subcommand("geodesic", "geodesic experiments");
  CLI::App* cutseq = geo->add_subcommand("cutseq", "cutting sequences with growth traces");
  add_common(cutseq);
  cutseq->add_option("--seed", ctx.seed, "sampler seed");
  cutseq->add_option("--n", ctx.depth, "trace depth")->check(CLI::PositiveNumber);
  cutseq->add_option("--count", ctx.count, "number of geodesics")->check(CLI::PositiveNumber);
  cutseq->add_option("--k-radius", ctx.k_radius,
                     "near-origin constraint radius (negative = none)");

  CLI::App* pressure = app.add_subcommand("pressure", "pressure curve");
  CLI::App* pcompute = pressure->add_subcommand("compute", "estimate the pressure grid");
  add_common(pcompute);
  pcompute->add_option("--beta", ctx.beta, "also print the grid row nearest this beta");

  CLI::App* spectrum = app.add_subcommand("spectrum", "dimension spectrum and rate function");
  CLI::App* scompute = spectrum->add_subcommand("compute", "Legendre spectrum grid");
  add_common(scompute);
  scompute->add_option("--grid", ctx.grid, "spectrum grid size")->check(CLI::Range(5, 100000));

  CLI::App* ldp = app.add_subcommand("ldp", "deviation tail experiments");
  CLI::App* simulate = ldp->add_subcommand("simulate", "tail measures at chosen rates");
  add_common(simulate);
  simulate->add_option("--alpha-list", ctx.alpha_list, "growth rates")->delimiter(',');
  simulate->add_option("--n-list", ctx.n_list, "depths")->delimiter(',');
  simulate->add_option("--samples", ctx.samples, "Monte-Carlo sample count");
  simulate->add_option("--seed", ctx.seed, "sampler seed");
  simulate->add_option("--method", ctx.method, "estimator")
      ->check(CLI::IsMember({"mc", "cylinder", "both"}));

  CLI::App* er = app.add_subcommand("er-law", "windowed growth statistic");
  add_common(er);
  er->add_option("--alpha", ctx.alpha, "growth rate of the window law")->required();
  er->add_option("--n", ctx.depth, "trace depth")->check(CLI::PositiveNumber);
  er->add_option("--count", ctx.count, "number of geodesics")->check(CLI::PositiveNumber);
  er->add_option("--seed", ctx.seed, "sampler seed");
  er->add_option("--k-radius", ctx.k_radius,
                 "near-origin constraint radius (negative = none)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    std::cerr << e.what() << "\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (!manifest_to_check.empty()) return check_manifest(manifest_to_check);
    if (validate->parsed()) cmd_group_validate(ctx);
    else if (show->parsed()) cmd_bsmap_show(ctx);
    else if (pexport->parsed()) cmd_partition_export(ctx);
    else if (cutseq->parsed()) cmd_geodesic_cutseq(ctx);
    else if (pcompute->parsed()) cmd_pressure_compute(ctx);
    else if (scompute->parsed()) cmd_spectrum_compute(ctx);
    else if (simulate->parsed()) cmd_ldp_simulate(ctx);
    else if (er->parsed()) cmd_er_law(ctx);
    else {
      std::cerr << app.help() << "\n";
      return 2;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const ApiError& e) {
    std::cerr << "error " << e.name << ": " << e.message << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}
