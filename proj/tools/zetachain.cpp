// zetachain command-line front end.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zetachain.hpp"

namespace fs = std::filesystem;
using namespace zetachain;

namespace {

struct Config {
  std::vector<int> n{1, 1, 1};
  double ell = 12.0;
  std::string kind = "flow";
  std::vector<double> lengths;
  int order = -1;
  bool adaptive = false;
  std::vector<double> window;
  double h = 0.0;
  std::vector<double> s{2.0, 0.0};
  std::vector<double> z{1.0, 0.0};
  std::vector<double> zs;  // theorem3 real z values
  std::vector<double> grid{-1.0, 2.0, -8.0, 8.0};
  int grid_n = 41;
  int length = 2;
  double l_max = 40.0;
  int k_max = 30;
  std::string input;
  std::string out = ".";
  unsigned threads = 0;
};

Triple triple(const Config& c) {
  if (c.n.size() != 3) throw Error(Errc::UsageError, "--n needs three integers");
  return {c.n[0], c.n[1], c.n[2]};
}

Window window_of(const std::vector<double>& v, const char* flag) {
  if (v.size() != 4) throw Error(Errc::UsageError, std::string(flag) + " needs re_min,re_max,im_min,im_max");
  Window w{v[0], v[1], v[2], v[3]};
  require_valid(w);
  return w;
}

cplx complex_of(const std::vector<double>& v, const char* flag) {
  if (v.empty() || v.size() > 2) throw Error(Errc::UsageError, std::string(flag) + " needs re[,im]");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

/// Shortest round-trip decimal, for canonical argument strings.
std::string short_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + short_double(v[k]);
  return s;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

/// Tracks the options a command actually used, in a fixed order.
struct Run {
  std::string command;
  std::vector<std::pair<std::string, std::string>> args;
  std::string scheme = "null";
  int order = -1;
  std::vector<std::pair<std::string, double>> tolerances;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  fs::path dir;

  void arg(const std::string& k, const std::string& v) { args.emplace_back(k, v); }

  std::string canonical_args() const {
    std::string s;
    for (const auto& [k, v] : args) s += (s.empty() ? "" : " ") + ("--" + k) + " " + v;
    return s;
  }

  std::string header() const { return io::header_line(command, canonical_args()); }

  void write(const std::string& name, const std::string& body) const { io::write_file((dir / name).string(), body); }

  void finish() const {
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream os;
    os << "{\n  \"generator\": " << io::json_string(header()) << ",\n";
    os << "  \"command\": " << io::json_string(command) << ",\n  \"args\": {";
    for (std::size_t k = 0; k < args.size(); ++k) {
      os << (k ? ", " : "") << io::json_string(args[k].first) << ": " << io::json_string(args[k].second);
    }
    os << "},\n  \"scheme\": " << scheme << ",\n  \"order\": ";
    if (order >= 0) {
      os << order;
    } else {
      os << "null";
    }
    os << ",\n  \"tolerances\": {";
    for (std::size_t k = 0; k < tolerances.size(); ++k) {
      os << (k ? ", " : "") << io::json_string(tolerances[k].first) << ": " << detail::fmt_double(tolerances[k].second);
    }
    os << "},\n  \"wall_ms\": " << detail::fmt_double(ms) << "\n}\n";
    write("run.json", os.str());
  }
};

Run start_run(const std::string& command, const Config& c) {
  Run r;
  r.command = command;
  r.dir = c.out;
  std::error_code ec;
  fs::create_directories(r.dir, ec);
  if (!fs::is_directory(r.dir)) throw Error(Errc::UsageError, "cannot create output directory " + c.out);
  return r;
}

IfsScheme build_scheme(const Config& c, Run& run) {
  IfsScheme s;
  if (c.kind == "flow") {
    run.arg("kind", "flow");
    run.arg("n", join(c.n));
    run.arg("ell", short_double(c.ell));
    s = build_flow_adapted(triple(c), c.ell);
  } else if (c.kind == "bowen") {
    run.arg("kind", "bowen");
    std::array<double, 3> l{};
    if (!c.lengths.empty()) {
      if (c.lengths.size() != 3) throw Error(Errc::UsageError, "--lengths needs three reals");
      l = {c.lengths[0], c.lengths[1], c.lengths[2]};
      run.arg("lengths", join(c.lengths));
    } else {
      const Triple n = triple(c);
      l = {n[0] * c.ell, n[1] * c.ell, n[2] * c.ell};
      run.arg("n", join(c.n));
      run.arg("ell", short_double(c.ell));
    }
    s = build_bowen_series(l[0], l[1], l[2]);
  } else {
    throw Error(Errc::UsageError, "--kind must be flow or bowen");
  }
  std::ostringstream os;
  os << "{\"kind\": \"" << to_string(s.kind) << "\", \"n\": [" << s.n[0] << ',' << s.n[1] << ',' << s.n[2]
     << "], \"ell\": " << detail::fmt_double(s.ell) << ", \"lengths\": " << io::detail::real_array(s.lengths) << '}';
  run.scheme = os.str();
  return s;
}

int resolve_order(const Config& c, const IfsScheme& s) { return c.order > 0 ? c.order : default_order(s.kind); }

unsigned threads_of(const Config& c) { return c.threads > 0 ? c.threads : default_thread_count(); }

std::string report_text(const ValidationReport& r) {
  std::ostringstream os;
  auto flag = [&](const char* name, bool ok, double margin) {
    os << name << ": " << (ok ? "pass" : "FAIL") << " (" << detail::fmt_double(margin) << ")\n";
  };
  flag("disks_disjoint", r.disks_disjoint(), r.min_disk_gap);
  flag("images_contained", r.images_contained(), r.min_containment_margin);
  flag("images_disjoint", r.images_disjoint(), r.min_image_gap);
  flag("contracting", r.contracting(), r.contraction_theta);
  if (r.min_extended_gap) flag("extended_disks_clear", r.extended_disks_clear(), *r.min_extended_gap);
  if (r.max_radius) flag("radii_below_half", r.small_radii(), *r.max_radius);
  return os.str();
}

// ---- commands ----

int cmd_ifs(const std::string& action, const Config& c) {
  Run run = start_run("ifs " + action, c);
  if (action == "build") {
    const IfsScheme s = build_scheme(c, run);
    run.write("ifs.json", io::scheme_json(run.header(), s));
    std::cout << report_text(validate_scheme(s));
  } else {
    if (c.input.empty()) throw Error(Errc::UsageError, "ifs validate needs --input");
    run.arg("input", c.input);
    const IfsScheme s = io::parse_scheme_json(io::read_file(c.input));
    const auto rep = validate_scheme(s);
    std::cout << report_text(rep);
    run.finish();
    return rep.ifs_valid() ? 0 : 3;
  }
  run.finish();
  return 0;
}

int cmd_words(const std::string& action, const Config& c) {
  Run run = start_run("words " + action, c);
  const IfsScheme s = build_scheme(c, run);
  const unsigned threads = threads_of(c);
  if (action == "census") {
    run.arg("length", std::to_string(c.length));
    std::ostringstream os;
    os << run.header() << "\nweight,count\n";
    for (const auto& [w, k] : class_census(s, c.length)) os << w << ',' << k << '\n';
    run.write("census.csv", os.str());
  } else if (action == "count") {
    run.arg("length", std::to_string(c.length));
    std::ostringstream os;
    os << run.header() << "\nword_length,closed_words\n";
    for (int n = 1; n <= c.length; ++n) os << n << ',' << enumerate_closed(s, n).size() << '\n';
    run.write("counts.csv", os.str());
  } else if (action == "spectrum") {
    run.arg("lmax", short_double(c.l_max));
    run.write("spectrum.csv", io::spectrum_csv(run.header(), length_spectrum(s, c.l_max, kDefaultWordCap, threads)));
  } else {
    run.order = resolve_order(c, s);
    run.arg("order", std::to_string(run.order));
    run.write("database.csv", io::database_csv(run.header(), compile_database(s, run.order, kDefaultWordCap, threads)));
  }
  run.finish();
  return 0;
}

int cmd_zeta(const std::string& action, const Config& c) {
  Run run = start_run("zeta " + action, c);
  const IfsScheme s = build_scheme(c, run);
  run.order = resolve_order(c, s);
  run.arg("order", std::to_string(run.order));
  const cplx sv = complex_of(c.s, "--s");
  run.arg("s", join(c.s));
  const auto db = compile_database(s, run.order, kDefaultWordCap, threads_of(c));
  std::ostringstream os;
  os << std::string();
  if (action == "eval") {
    const cplx zv = complex_of(c.z, "--z");
    run.arg("z", join(c.z));
    if (c.adaptive) run.arg("adaptive", "1");
    const ZetaValue v = c.adaptive ? evaluate_adaptive(db, sv, zv, default_order(s.kind)) : evaluate(db, sv, zv, run.order);
    run.tolerances.emplace_back("adaptive_last_term", 1e-10);
    os << run.header() << "\nre,im,d_re,d_im,last_term,order\n"
       << detail::fmt_double(v.value.real()) << ',' << detail::fmt_double(v.value.imag()) << ','
       << detail::fmt_double(v.s_derivative.real()) << ',' << detail::fmt_double(v.s_derivative.imag()) << ','
       << detail::fmt_double(v.last_term) << ',' << v.order << '\n';
    run.write("zeta.csv", os.str());
  } else if (action == "euler") {
    const cplx zv = complex_of(c.z, "--z");
    run.arg("z", join(c.z));
    run.arg("kmax", std::to_string(c.k_max));
    const cplx v = euler_product(db, sv, zv, c.k_max);
    os << run.header() << "\nre,im\n" << detail::fmt_double(v.real()) << ',' << detail::fmt_double(v.imag()) << '\n';
    run.write("euler.csv", os.str());
  } else {
    const auto b = z_polynomial(db, sv, run.order);
    os << run.header() << "\nk,re,im\n";
    for (std::size_t k = 0; k < b.size(); ++k) {
      os << k << ',' << detail::fmt_double(b[k].real()) << ',' << detail::fmt_double(b[k].imag()) << '\n';
    }
    run.write("zpoly.csv", os.str());
  }
  run.finish();
  return 0;
}

RootOptions root_options(const Config& c, Run& run) {
  RootOptions o;
  o.threads = threads_of(c);
  if (c.h > 0.0) {
    o.h = c.h;
    run.arg("spacing", short_double(c.h));
  }
  run.tolerances = {{"newton_step", o.step_tol}, {"accept", o.accept_tol}, {"dedupe", o.dedupe},
                    {"verify_radius", o.verify_radius}};
  return o;
}

int cmd_resonances(const std::string& action, const Config& c) {
  Run run = start_run("resonances " + action, c);
  const IfsScheme s = build_scheme(c, run);
  run.order = resolve_order(c, s);
  run.arg("order", std::to_string(run.order));
  const auto db = compile_database(s, run.order, kDefaultWordCap, threads_of(c));
  const ZetaFunction F(db, complex_of(c.z, "--z"), run.order);
  run.arg("z", join(c.z));
  if (action == "find") {
    const Window w = window_of(c.window, "--window");
    run.arg("window", join(c.window));
    const RootOptions o = root_options(c, run);
    const auto rs = find_resonances(F, w, o);
    run.write("resonances.csv", io::resonances_csv(run.header(), rs));
  } else {
    const double d = find_delta(F);
    std::ostringstream os;
    os << run.header() << "\ndelta\n" << detail::fmt_double(d) << '\n';
    run.write("delta.csv", os.str());
    std::cout << detail::fmt_double(d) << '\n';
  }
  run.finish();
  return 0;
}

int cmd_poly(const std::string& action, const Config& c) {
  Run run = start_run("poly " + action, c);
  run.arg("n", join(c.n));
  const auto p = build_polynomial(triple(c));
  if (action == "build") {
    std::ostringstream os;
    os << run.header() << "\ndegree,coefficient\n";
    for (int k = 0; k <= p.degree(); ++k) os << k << ',' << p.coeffs[k] << '\n';
    run.write("poly.csv", os.str());
  } else if (action == "roots") {
    run.write("roots.csv", io::roots_csv(run.header(), polynomial_roots(p)));
  } else {
    const Window w = window_of(c.window, "--window");
    run.arg("window", join(c.window));
    run.write("chains.csv", io::chains_csv(run.header(), chain_points(p, w)));
  }
  run.finish();
  return 0;
}

int cmd_compare(const Config& c) {
  Run run = start_run("compare", c);
  Config fc = c;
  fc.kind = "flow";
  const IfsScheme s = build_scheme(fc, run);
  run.order = resolve_order(c, s);
  run.arg("order", std::to_string(run.order));
  const Window U = window_of(c.window, "--window");
  run.arg("window", join(c.window));
  const auto db = compile_database(s, run.order, kDefaultWordCap, threads_of(c));
  const ZetaFunction F(db, 1.0, run.order);
  const RootOptions o = root_options(c, run);
  const auto rs = find_resonances(F, U.scaled(1.0 / c.ell), o);
  const auto rep = compare_rescaled(rs, c.ell, build_polynomial(triple(c)), U);
  run.tolerances.emplace_back("match_cutoff", kMatchCutoff);
  run.write("resonances.csv", io::resonances_csv(run.header(), rs));
  run.write("compare.csv", io::compare_csv(run.header(), rep));
  std::cout << "resonances " << rep.resonance_count << " chain points " << rep.chain_count << " main "
            << rep.main_resonance_count << '/' << rep.main_chain_count << " max main distance "
            << detail::fmt_double(rep.max_main_distance) << '\n';
  run.finish();
  return 0;
}

int cmd_theorem3(const Config& c) {
  Run run = start_run("theorem3", c);
  Config fc = c;
  fc.kind = "flow";
  const IfsScheme s = build_scheme(fc, run);
  run.order = resolve_order(c, s);
  run.arg("order", std::to_string(run.order));
  const Window g = window_of(c.grid, "--grid");
  run.arg("grid", join(c.grid));
  run.arg("grid-n", std::to_string(c.grid_n));
  std::vector<cplx> zs;
  for (double z : c.zs.empty() ? std::vector<double>{1.0} : c.zs) zs.emplace_back(z, 0.0);
  run.arg("zs", join(c.zs.empty() ? std::vector<double>{1.0} : c.zs));
  const auto db = compile_database(s, run.order, kDefaultWordCap, threads_of(c));
  const double sup = theorem3_supnorm(db, c.ell, build_polynomial(triple(c)), g, zs, run.order, c.grid_n, c.grid_n,
                                      threads_of(c));
  std::ostringstream os;
  os << run.header() << "\nell,supnorm\n" << detail::fmt_double(c.ell) << ',' << detail::fmt_double(sup) << '\n';
  run.write("theorem3.csv", os.str());
  std::cout << detail::fmt_double(sup) << '\n';
  run.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonances of 3-funneled Schottky surfaces and their chain polynomials"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* sub, bool scheme) {
    sub->add_option("-o,--out", c.out, "output directory");
    sub->add_option("--threads", c.threads, "worker threads (default ZETA_THREADS or all cores)");
    if (scheme) {
      sub->add_option("--n", c.n, "funnel multiples n1,n2,n3")->delimiter(',')->expected(3);
      sub->add_option("--ell", c.ell, "length scale");
      sub->add_option("--kind", c.kind, "flow or bowen");
      sub->add_option("--lengths", c.lengths, "bowen lengths l1,l2,l3")->delimiter(',')->expected(3);
      sub->add_option("--order", c.order, "cycle expansion order");
    }
  };
  auto action_of = [&](CLI::App* sub, std::string& action, std::vector<std::string> allowed) {
    sub->add_option("action", action, "action")->required()->check(CLI::IsMember(allowed));
  };

  std::string ifs_action, words_action, zeta_action, res_action, poly_action;
  auto* ifs = app.add_subcommand("ifs", "build or validate an iterated function scheme");
  action_of(ifs, ifs_action, {"build", "validate"});
  common(ifs, true);
  ifs->add_option("--input", c.input, "scheme JSON to validate");

  auto* words = app.add_subcommand("words", "closed words, census, spectra, orbit database");
  action_of(words, words_action, {"count", "census", "spectrum", "database"});
  common(words, true);
  words->add_option("--length", c.length, "word length");
  words->add_option("--lmax", c.l_max, "maximal geodesic length");

  auto* zeta = app.add_subcommand("zeta", "evaluate the dynamical zeta function");
  action_of(zeta, zeta_action, {"eval", "euler", "zpoly"});
  common(zeta, true);
  zeta->add_option("--s", c.s, "s as re[,im]")->delimiter(',');
  zeta->add_option("--z", c.z, "z as re[,im]")->delimiter(',');
  zeta->add_flag("--adaptive", c.adaptive, "raise the order until the last terms are below 1e-10");
  zeta->add_option("--kmax", c.k_max, "Euler product k cutoff");

  auto* res = app.add_subcommand("resonances", "zeros of the zeta function");
  action_of(res, res_action, {"find", "delta"});
  common(res, true);
  res->add_option("--window", c.window, "re_min,re_max,im_min,im_max (unrescaled s)")->delimiter(',')->expected(4);
  res->add_option("--spacing", c.h, "seed grid spacing");
  res->add_option("--z", c.z, "z as re[,im]")->delimiter(',');

  auto* poly = app.add_subcommand("poly", "chain polynomial");
  action_of(poly, poly_action, {"build", "roots", "chains"});
  common(poly, false);
  poly->add_option("--n", c.n, "n1,n2,n3")->delimiter(',')->expected(3);
  poly->add_option("--window", c.window, "window for chain points")->delimiter(',')->expected(4);

  auto* cmp = app.add_subcommand("compare", "match rescaled resonances against chain points");
  common(cmp, true);
  cmp->add_option("--window", c.window, "rescaled window U")->delimiter(',')->expected(4);
  cmp->add_option("--spacing", c.h, "seed grid spacing");

  auto* th3 = app.add_subcommand("theorem3", "sup-norm distance of the rescaled zeta from the polynomial");
  common(th3, true);
  th3->add_option("--grid", c.grid, "s grid window")->delimiter(',')->expected(4);
  th3->add_option("--grid-n", c.grid_n, "grid points per axis");
  th3->add_option("--zs", c.zs, "real z values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "UsageError: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*ifs) return cmd_ifs(ifs_action, c);
    if (*words) return cmd_words(words_action, c);
    if (*zeta) return cmd_zeta(zeta_action, c);
    if (*res) return cmd_resonances(res_action, c);
    if (*poly) return cmd_poly(poly_action, c);
    if (*cmp) return cmd_compare(c);
    if (*th3) return cmd_theorem3(c);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return is_validation_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
