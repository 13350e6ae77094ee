#pragma once

// CSV and JSON artifacts. Every file starts with `# zetachain <command> <args>`
// (JSON carries the same line under "generator"); reals use 17 significant digits.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zetachain/chains.hpp"
#include "zetachain/error.hpp"
#include "zetachain/roots.hpp"
#include "zetachain/schemes.hpp"
#include "zetachain/symdyn.hpp"

namespace zetachain::io {

using detail::fmt_double;

inline std::string header_line(const std::string& command, const std::string& args) {
  return "# zetachain " + command + (args.empty() ? "" : " " + args);
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::UsageError, "cannot write " + path);
  out << body;
}

inline std::string resonances_csv(const std::string& header, const ResonanceSet& rs) {
  std::ostringstream os;
  os << header << "\nre,im,residual,newton_iters,verified\n";
  for (const auto& e : rs.entries) {
    os << fmt_double(e.s.real()) << ',' << fmt_double(e.s.imag()) << ',' << fmt_double(e.residual) << ','
       << e.newton_iters << ',' << (e.verified ? 1 : 0) << '\n';
  }
  return os.str();
}

inline std::string roots_csv(const std::string& header, const std::vector<PolyRoot>& roots) {
  std::ostringstream os;
  os << header << "\nre,im,multiplicity\n";
  for (const auto& r : roots) os << fmt_double(r.z.real()) << ',' << fmt_double(r.z.imag()) << ',' << r.multiplicity << '\n';
  return os.str();
}

inline std::string chains_csv(const std::string& header, const ChainSet& cs) {
  std::ostringstream os;
  os << header << "\nre,im,multiplicity,k\n";
  for (const auto& p : cs.points) {
    os << fmt_double(p.s.real()) << ',' << fmt_double(p.s.imag()) << ',' << p.multiplicity << ',' << p.k << '\n';
  }
  return os.str();
}

inline std::string compare_csv(const std::string& header, const MatchReport& rep) {
  std::ostringstream os;
  os << header << "\nres_re,res_im,match_re,match_im,dist,region\n";
  for (const auto& r : rep.rows) {
    os << fmt_double(r.resonance.real()) << ',' << fmt_double(r.resonance.imag()) << ',';
    if (r.match) {
      os << fmt_double(r.match->real()) << ',' << fmt_double(r.match->imag()) << ',' << fmt_double(r.dist);
    } else {
      os << ",,";
    }
    os << ',' << to_string(r.region) << '\n';
  }
  return os.str();
}

inline std::string database_csv(const std::string& header, const OrbitDatabase& db) {
  std::ostringstream os;
  os << header << "\nword_length,l_w,weight,class_size,prime,rep_index\n";
  for (const auto& bucket : db.records) {
    for (const auto& r : bucket) {
      os << r.word_length << ',' << fmt_double(r.length) << ',' << r.weight << ',' << r.class_size << ','
         << (r.prime ? 1 : 0) << ',' << r.rep_index << '\n';
    }
  }
  return os.str();
}

inline std::string spectrum_csv(const std::string& header, const std::vector<SpectrumEntry>& spec) {
  std::ostringstream os;
  os << header << "\nlength,weight,multiplicity\n";
  for (const auto& e : spec) {
    os << fmt_double(e.length) << ',';
    if (e.weight) os << *e.weight;
    os << ',' << e.multiplicity << '\n';
  }
  return os.str();
}

namespace detail {

inline Moebius unfold(const Edge& e) {
  if (e.offset > 0) return Moebius::translation(-e.offset) * e.map;
  if (e.offset < 0) return e.map * Moebius::translation(-e.offset);
  return e.map;
}

inline Moebius fold(const Moebius& m, double offset) {
  if (offset > 0) return Moebius::translation(offset) * m;
  if (offset < 0) return m * Moebius::translation(offset);
  return m;
}

template <class Seq>
std::string real_array(const Seq& v) {
  std::string s = "[";
  bool first = true;
  for (double x : v) {
    if (!first) s += ',';
    s += fmt_double(x);
    first = false;
  }
  return s + "]";
}

}  // namespace detail

inline std::string scheme_json(const std::string& header, const IfsScheme& s) {
  std::ostringstream os;
  os << "{\n  \"generator\": " << json_string(header) << ",\n";
  os << "  \"kind\": \"" << to_string(s.kind) << "\",\n";
  os << "  \"lengths\": " << detail::real_array(s.lengths) << ",\n";
  os << "  \"n\": [" << s.n[0] << ',' << s.n[1] << ',' << s.n[2] << "],\n";
  os << "  \"ell\": " << fmt_double(s.ell) << ",\n";
  os << "  \"kappa\": " << detail::real_array(std::array<double, 3>{s.kappa(1), s.kappa(2), s.kappa(3)}) << ",\n";
  os << "  \"delta_offset\": " << fmt_double(s.delta_offset) << ",\n";
  os << "  \"extended_radius\": " << fmt_double(s.extended_radius) << ",\n";
  os << "  \"generator_param\": " << fmt_double(s.generator_param) << ",\n";
  os << "  \"disks\": [";
  for (std::size_t k = 0; k < s.disks.size(); ++k) {
    os << (k ? ", " : "") << "{\"center\": " << fmt_double(s.disks[k].center)
       << ", \"radius\": " << fmt_double(s.disks[k].radius) << '}';
  }
  os << "],\n  \"adjacency\": [";
  for (std::size_t k = 0; k < s.adjacency.size(); ++k) os << (k ? "," : "") << s.adjacency[k];
  os << "],\n  \"edges\": [\n";
  for (std::size_t k = 0; k < s.edges.size(); ++k) {
    const Edge& e = s.edges[k];
    const auto m = detail::unfold(e).entries();
    os << "    {\"from\": " << e.from << ", \"to\": " << e.to << ", \"matrix\": " << detail::real_array(m)
       << ", \"det\": " << e.map.det << ", \"offset\": " << fmt_double(e.offset) << ", \"weight\": " << e.weight << '}'
       << (k + 1 < s.edges.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

inline IfsScheme parse_scheme_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(Errc::UsageError, std::string("scheme JSON: ") + e.what());
  }
  try {
    IfsScheme s;
    s.kind = j.at("kind").get<std::string>() == "flow" ? SchemeKind::flow : SchemeKind::bowen;
    s.lengths = j.at("lengths").get<std::array<double, 3>>();
    s.n = j.at("n").get<Triple>();
    s.ell = j.at("ell").get<double>();
    const auto kap = j.at("kappa").get<std::array<double, 3>>();
    for (int k = 0; k < 3; ++k) s.kappa_twice[k] = static_cast<int>(std::lround(2.0 * kap[k]));
    s.delta_offset = j.value("delta_offset", 0.0);
    s.extended_radius = j.value("extended_radius", 0.0);
    s.generator_param = j.value("generator_param", 0.0);
    for (const auto& d : j.at("disks")) s.disks.push_back({d.at("center").get<double>(), d.at("radius").get<double>()});
    s.symbol_count = static_cast<int>(s.disks.size());
    s.adjacency = j.at("adjacency").get<std::vector<int>>();
    if (s.adjacency.size() != static_cast<std::size_t>(s.symbol_count * s.symbol_count)) {
      throw Error(Errc::UsageError, "scheme JSON: adjacency size does not match the disks");
    }
    for (const auto& je : j.at("edges")) {
      Edge e;
      e.from = je.at("from").get<int>();
      e.to = je.at("to").get<int>();
      const auto m = je.at("matrix").get<std::array<double, 4>>();
      Moebius base{m[0], m[1], m[2], m[3], je.at("det").get<int>(), 0.0};
      e.offset = je.at("offset").get<double>();
      e.weight = je.at("weight").get<int>();
      e.map = detail::fold(base, e.offset);
      s.edges.push_back(e);
    }
    zetachain::detail::finalize_edges(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::UsageError, std::string("scheme JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::UsageError, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace zetachain::io
