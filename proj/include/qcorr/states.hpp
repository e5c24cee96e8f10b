#pragma once

// Benchmark states, the seeded Haar sampler, and the JSON state file.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "qcorr/hilbert.hpp"
#include "qcorr/optimize.hpp"

namespace qcorr {

/// (|0...0> + |1...1>) / sqrt(2) on n qubits.
inline PureState ghz(int n) {
  if (n < 2) throw ArityError("ghz needs at least 2 qubits");
  Vector amp = Vector::Zero(1 << n);
  amp(0) = amp((1 << n) - 1) = 1.0 / std::sqrt(2.0);
  return PureState(Dims(static_cast<std::size_t>(n), 2), std::move(amp));
}

/// Equal superposition of the n single-excitation basis states.
inline PureState w_state(int n) {
  if (n < 2) throw ArityError("w state needs at least 2 qubits");
  Vector amp = Vector::Zero(1 << n);
  for (int k = 0; k < n; ++k) amp(1 << k) = 1.0 / std::sqrt(static_cast<double>(n));
  return PureState(Dims(static_cast<std::size_t>(n), 2), std::move(amp));
}

/// Normalized vector of i.i.d. standard complex Gaussians drawn from a
/// mt19937_64 seeded with `seed` (real part, then imaginary, per amplitude).
inline PureState haar_random(const Dims& dims, std::uint64_t seed) {
  detail::check_dims(dims);
  Rng rng(seed);
  return PureState::normalized(dims, gaussian_matrix(total_dim(dims), 1, rng).col(0));
}

/// Tensor product of independent Haar-random single-party states.
inline PureState product_random(const Dims& dims, std::uint64_t seed) {
  detail::check_dims(dims);
  Rng rng(seed);
  Vector amp = Vector::Ones(1);
  for (int d : dims) {
    const Vector local = gaussian_matrix(d, 1, rng).col(0).normalized();
    Vector next(amp.size() * d);
    for (Eigen::Index i = 0; i < amp.size(); ++i) next.segment(i * d, d) = amp(i) * local;
    amp = std::move(next);
  }
  return PureState::normalized(dims, std::move(amp));
}

inline constexpr double kFileNormTol = 1e-9;

/// {"dims": [...], "amplitudes": [[re, im], ...]}, row-major, subsystem 0
/// most significant, reals as %.17e.
inline std::string state_to_json(const PureState& psi) {
  std::ostringstream out;
  out << "{\n  \"dims\": [";
  for (std::size_t i = 0; i < psi.dims().size(); ++i) out << (i ? ", " : "") << psi.dims()[i];
  out << "],\n  \"amplitudes\": [\n";
  char buf[96];
  for (int i = 0; i < psi.dim(); ++i) {
    std::snprintf(buf, sizeof buf, "    [%.17e, %.17e]", psi.amplitudes()(i).real(), psi.amplitudes()(i).imag());
    out << buf << (i + 1 < psi.dim() ? ",\n" : "\n");
  }
  out << "  ]\n}\n";
  return out.str();
}

inline PureState state_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("state file is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dims") || !doc.contains("amplitudes"))
    throw FormatError("state file needs 'dims' and 'amplitudes'");
  Dims dims;
  Vector amp;
  try {
    dims = doc.at("dims").get<Dims>();
    const auto& list = doc.at("amplitudes");
    if (!list.is_array()) throw FormatError("'amplitudes' must be a list");
    amp.resize(static_cast<Eigen::Index>(list.size()));
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& pair = list[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
        throw FormatError("amplitude " + std::to_string(i) + " is not a [re, im] pair");
      amp(static_cast<Eigen::Index>(i)) = cplx(pair[0].get<double>(), pair[1].get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(e.what());
  }
  try {
    detail::check_dims(dims);
  } catch (const DimensionError& e) {
    throw FormatError(e.what());
  }
  if (amp.size() != total_dim(dims))
    throw FormatError(std::to_string(amp.size()) + " amplitudes for dims " + to_string(dims));
  const double norm = amp.squaredNorm();
  if (std::abs(norm - 1.0) > kFileNormTol) throw FormatError("amplitude norm^2 " + std::to_string(norm) + " is not 1");
  // Absorb the sub-1e-9 normalization slack so the PureState invariant holds.
  if (std::abs(norm - 1.0) > kNormTol) amp /= std::sqrt(norm);
  return PureState(std::move(dims), std::move(amp));
}

inline void write_state(const PureState& psi, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << state_to_json(psi);
  if (!out) throw FormatError("write to " + path + " failed");
}

inline PureState read_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return state_from_json(buf.str());
}

/// Parsed state address: ghz:N, w:N, haar:d0,d1,..., product:d0,..., file:PATH.
struct StateSpec {
  enum class Kind { Ghz, W, ProductRandom, HaarRandom, File };
  Kind kind = Kind::HaarRandom;
  int n_parties = 0;
  Dims dims;
  std::string path;

  bool random() const { return kind == Kind::ProductRandom || kind == Kind::HaarRandom; }

  std::string to_string() const {
    const auto dim_list = [&] {
      std::string s;
      for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
      return s;
    };
    switch (kind) {
      case Kind::Ghz: return "ghz:" + std::to_string(n_parties);
      case Kind::W: return "w:" + std::to_string(n_parties);
      case Kind::ProductRandom: return "product:" + dim_list();
      case Kind::HaarRandom: return "haar:" + dim_list();
      case Kind::File: return "file:" + path;
    }
    return {};
  }

  static StateSpec parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw FormatError("state spec '" + text + "' lacks a ':'");
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    const auto parse_int = [&](const std::string& s) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size() || s.empty()) throw FormatError("bad integer '" + s + "' in state spec '" + text + "'");
      return v;
    };
    StateSpec spec;
    if (kind == "ghz" || kind == "w") {
      spec.kind = kind == "ghz" ? Kind::Ghz : Kind::W;
      spec.n_parties = parse_int(arg);
      if (spec.n_parties < 2) throw FormatError("need at least 2 parties in '" + text + "'");
      spec.dims.assign(static_cast<std::size_t>(spec.n_parties), 2);
    } else if (kind == "haar" || kind == "product") {
      spec.kind = kind == "haar" ? Kind::HaarRandom : Kind::ProductRandom;
      std::stringstream ss(arg);
      std::string item;
      while (std::getline(ss, item, ',')) spec.dims.push_back(parse_int(item));
      try {
        detail::check_dims(spec.dims);
      } catch (const DimensionError& e) {
        throw FormatError(e.what());
      }
      spec.n_parties = static_cast<int>(spec.dims.size());
    } else if (kind == "file") {
      spec.kind = Kind::File;
      spec.path = arg;
      if (arg.empty()) throw FormatError("empty path in state spec");
    } else {
      throw FormatError("unknown state kind '" + kind + "'");
    }
    return spec;
  }

  /// Seed is ignored for deterministic kinds.
  PureState make(std::uint64_t seed) const {
    switch (kind) {
      case Kind::Ghz: return ghz(n_parties);
      case Kind::W: return w_state(n_parties);
      case Kind::ProductRandom: return product_random(dims, seed);
      case Kind::HaarRandom: return haar_random(dims, seed);
      case Kind::File: return read_state(path);
    }
    throw FormatError("unreachable state kind");
  }
};

}  // namespace qcorr
