#include "saddle_raar/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <system_error>

namespace saddle_raar::io {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json complex_to_json(const CVec& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i].real());
    arr.push_back(v[i].imag());
  }
  return arr;
}

CVec complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() % 2 != 0) throw InvalidDataError("complex vector must be an even-length array");
  CVec v(static_cast<Index>(j.size() / 2));
  for (Index i = 0; i < v.size(); ++i) {
    v[i] = Complex(j[static_cast<std::size_t>(2 * i)].get<double>(), j[static_cast<std::size_t>(2 * i + 1)].get<double>());
  }
  return v;
}

Json real_to_json(const RVec& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

RVec real_from_json(const Json& j) {
  const auto vals = j.get<std::vector<double>>();
  return Eigen::Map<const RVec>(vals.data(), static_cast<Index>(vals.size()));
}

Json ensemble_to_json(const MeasurementEnsemble& e) {
  Json j;
  j["n"] = e.n();
  j["N"] = e.N();
  j["seed"] = e.seed();
  if (e.kind() == EnsembleKind::DenseGaussian) {
    j["kind"] = "dense-gaussian";
  } else {
    j["kind"] = "masked-dft";
    j["grid"] = {e.grid().rows, e.grid().cols};
    j["padded"] = {e.padded().rows, e.padded().cols};
    j["c0"] = e.c0();
    Json masks = Json::array();
    for (const auto& m : e.masks()) masks.push_back(complex_to_json(m));
    j["masks"] = masks;
  }
  return j;
}

MeasurementEnsemble ensemble_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto seed = j.at("seed").get<std::uint64_t>();
  if (kind == "dense-gaussian") {
    return build_gaussian_ensemble(j.at("n").get<Index>(), j.at("N").get<Index>(), seed);
  }
  if (kind == "masked-dft") {
    const GridShape grid{j.at("grid")[0].get<int>(), j.at("grid")[1].get<int>()};
    const GridShape padded{j.at("padded")[0].get<int>(), j.at("padded")[1].get<int>()};
    std::vector<CVec> masks;
    for (const auto& m : j.at("masks")) masks.push_back(complex_from_json(m));
    return build_cdp_ensemble(grid, std::move(masks), padded, seed);
  }
  throw InvalidDataError("unknown ensemble kind '" + kind + "'");
}

Json state_to_json(const SolverState& s) {
  return std::visit(
      [](const auto& st) -> Json {
        using T = std::decay_t<decltype(st)>;
        Json j;
        j["k"] = st.k;
        if constexpr (std::is_same_v<T, RaarState>) {
          j["algo"] = "raar";
          j["beta"] = st.beta;
          j["w"] = complex_to_json(st.w);
        } else {
          j["y"] = complex_to_json(st.y);
          j["z"] = complex_to_json(st.z);
          j["lambda"] = complex_to_json(st.lambda);
          if constexpr (std::is_same_v<T, AdmmState>) {
            j["algo"] = "admm";
            j["beta"] = st.beta;
          } else {
            j["algo"] = "drs";
            j["rho"] = st.rho;
          }
        }
        return j;
      },
      s);
}

SolverState state_from_json(const Json& j) {
  const Algorithm algo = algorithm_from_string(j.at("algo").get<std::string>());
  const int k = j.value("k", 0);
  switch (algo) {
    case Algorithm::Raar:
      return RaarState{complex_from_json(j.at("w")), k, j.at("beta").get<double>()};
    case Algorithm::Admm: {
      AdmmState s;
      s.y = complex_from_json(j.at("y"));
      s.z = complex_from_json(j.at("z"));
      s.lambda = complex_from_json(j.at("lambda"));
      s.k = k;
      s.beta = j.at("beta").get<double>();
      return s;
    }
    case Algorithm::Drs: {
      DrsState s;
      s.y = complex_from_json(j.at("y"));
      s.z = complex_from_json(j.at("z"));
      s.lambda = complex_from_json(j.at("lambda"));
      s.k = k;
      s.rho = j.at("rho").get<double>();
      return s;
    }
  }
  throw InvalidDataError("bad state");
}

std::string trace_csv(const std::vector<DiagnosticsRecord>& trace) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << kTraceHeader << '\n';
  for (const auto& r : trace) {
    os << r.k << ',' << r.param << ',' << r.residual << ',' << r.deriv_norm << ',' << r.t_ratio << ','
       << r.objective << ',' << r.wall_ns << '\n';
  }
  return os.str();
}

namespace {

// JSON has no NaN/Inf; they become null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json to_json(const FixedPointCertificate& c) {
  Json j;
  j["phase_residual"] = number(c.phase_residual);
  j["f1_residual"] = number(c.f1_residual);
  j["f2_residual"] = number(c.f2_residual);
  j["c_imag_ratio"] = number(c.c_imag_ratio);
  j["magnitude_ok"] = c.magnitude_ok;
  j["max_threshold"] = number(c.max_threshold);
  j["beta_interval"] = {0.0, number(c.beta_max)};
  j["certified"] = c.certified;
  return j;
}

Json to_json(const SaddleCertificate& c) {
  Json j;
  j["fitted_rho"] = number(c.fitted_rho);
  j["first_order_defect"] = number(c.first_order_defect);
  j["hessian_min_eig"] = number(c.hessian_min_eig);
  j["eig_residual"] = number(c.eig_residual);
  j["symmetry_defect"] = number(c.symmetry_defect);
  j["strict"] = c.strict;
  j["beta_bound"] = number(c.beta_bound);
  j["beta_bound_norm_form"] = number(c.beta_bound_norm_form);
  j["dense"] = c.dense;
  j["converged"] = c.converged;
  return j;
}

Json to_json(const DrsCertificate& c) {
  Json j;
  j["range_defect"] = number(c.range_defect);
  j["complement_defect"] = number(c.complement_defect);
  j["magnitude_defect"] = number(c.magnitude_defect);
  j["second_order_min_eig"] = number(c.second_order_min_eig);
  j["dense"] = c.dense;
  j["converged"] = c.converged;
  return j;
}

Json to_json(const SpectralGap& g) {
  Json j;
  j["lambda2"] = number(g.lambda2);
  j["top_singular"] = number(g.top_singular);
  j["top_pair_residual"] = number(g.top_pair_residual);
  j["object_rank"] = g.object_rank;
  j["hypothesis_met"] = g.hypothesis_met;
  j["dense"] = g.dense;
  j["converged"] = g.converged;
  return j;
}

std::string pgm(const RVec& values, GridShape grid, int bits) {
  if (bits != 8 && bits != 16) throw RangeError("pgm: bits must be 8 or 16");
  require_size(values.size(), grid.size(), "pgm");
  const int maxval = bits == 8 ? 255 : 65535;
  const double top = values.size() > 0 ? values.maxCoeff() : 0.0;
  const double scale = top > 0.0 ? maxval / top : 0.0;
  std::ostringstream os;
  os << "P5\n" << grid.cols << ' ' << grid.rows << '\n' << maxval << '\n';
  for (Index i = 0; i < values.size(); ++i) {
    const auto g = static_cast<unsigned>(std::lround(std::clamp(values[i] * scale, 0.0, double(maxval))));
    if (bits == 8) {
      os.put(static_cast<char>(g));
    } else {
      os.put(static_cast<char>(g >> 8));
      os.put(static_cast<char>(g & 0xFF));
    }
  }
  return os.str();
}

}  // namespace saddle_raar::io
