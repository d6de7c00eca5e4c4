#include "dicm/chain_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "dicm/csv.hpp"
#include "dicm/kernel.hpp"

namespace dicm {

namespace {

constexpr int kFormatVersion = 1;

std::string w_file_name(Index i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "w_%05lld.csv", static_cast<long long>(i));
  return buf;
}

std::vector<std::string> numbered_header(const char* stem, Index count) {
  std::vector<std::string> h;
  for (Index j = 0; j < count; ++j) {
    h.push_back(std::string(stem) + std::to_string(j + 1));
  }
  return h;
}

void write_vec(std::ostream& out, const char* key, const Vec& v) {
  out << key;
  for (Index j = 0; j < v.size(); ++j) out << ' ' << format_double(v(j));
  out << '\n';
}

class MetaReader {
 public:
  explicit MetaReader(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::string key;
      ss >> key;
      std::vector<std::string> vals;
      std::string tok;
      while (ss >> tok) vals.push_back(tok);
      entries_[key] = vals;
    }
  }

  double num(const std::string& key) const {
    const auto& vals = get(key);
    if (vals.size() != 1) throw DataError("meta: bad value for " + key);
    return std::strtod(vals[0].c_str(), nullptr);
  }

  std::uint64_t u64(const std::string& key) const {
    const auto& vals = get(key);
    if (vals.size() != 1) throw DataError("meta: bad value for " + key);
    return std::strtoull(vals[0].c_str(), nullptr, 10);
  }

  Vec vec(const std::string& key, Index expected) const {
    const auto& vals = get(key);
    if (static_cast<Index>(vals.size()) != expected) {
      throw DataError("meta: bad length for " + key);
    }
    Vec v(expected);
    for (Index j = 0; j < expected; ++j) {
      v(j) = std::strtod(vals[static_cast<std::size_t>(j)].c_str(), nullptr);
    }
    return v;
  }

 private:
  const std::vector<std::string>& get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw DataError("meta: missing key " + key);
    return it->second;
  }
  std::map<std::string, std::vector<std::string>> entries_;
};

}  // namespace

void save_chain(const Chain& chain, const Dataset& train,
                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream meta(dir / "meta");
    if (!meta) throw DataError("cannot write '" + (dir / "meta").string() + "'");
    meta << "format_version " << kFormatVersion << '\n';
    meta << "n " << chain.meta.n << '\n';
    meta << "d " << chain.meta.d << '\n';
    meta << "q " << chain.meta.q << '\n';
    meta << "latent_dim " << chain.meta.latent_dim << '\n';
    meta << "layers " << chain.meta.layers << '\n';
    meta << "iterations " << chain.config.iterations << '\n';
    meta << "burn_in " << chain.config.burn_in << '\n';
    meta << "thinning " << chain.config.thinning << '\n';
    meta << "proposal_l " << format_double(chain.config.proposal_l) << '\n';
    meta << "proposal_u " << format_double(chain.config.proposal_u) << '\n';
    meta << "seed " << chain.config.seed << '\n';
    meta << "jitter " << format_double(chain.config.jitter) << '\n';
    meta << "ess_max_shrinks " << chain.config.ess_max_shrinks << '\n';
    meta << "prior_shape " << format_double(chain.priors.shape) << '\n';
    meta << "prior_rate_theta_y " << format_double(chain.priors.rate_theta_y)
         << '\n';
    meta << "prior_rate_theta_w " << format_double(chain.priors.rate_theta_w)
         << '\n';
    meta << "sample_count " << chain.size() << '\n';
    write_vec(meta, "x_lower", chain.meta.x_lower);
    write_vec(meta, "x_upper", chain.meta.x_upper);
    write_vec(meta, "y_center", chain.meta.y_center);
    write_vec(meta, "y_scale", chain.meta.y_scale);
    meta << "accept_theta_w " << format_double(chain.diagnostics.accept_theta_w)
         << '\n';
    meta << "accept_theta_y " << format_double(chain.diagnostics.accept_theta_y)
         << '\n';
    meta << "mean_ess_shrinks "
         << format_double(chain.diagnostics.mean_ess_shrinks) << '\n';
    meta << "likelihood_failures " << chain.diagnostics.likelihood_failures
         << '\n';
  }

  write_csv(dir / "x.csv", numbered_header("x", train.d()), train.x);
  write_csv(dir / "y.csv", numbered_header("y", train.q()), train.y);

  Mat thetas(chain.size(), 2);
  for (Index i = 0; i < chain.size(); ++i) {
    thetas(i, 0) = chain.samples[static_cast<std::size_t>(i)].theta_w;
    thetas(i, 1) = chain.samples[static_cast<std::size_t>(i)].theta_y;
  }
  write_csv(dir / "thetas.csv", {"theta_w", "theta_y"}, thetas);

  const auto w_header = numbered_header("w", chain.meta.latent_dim);
  for (Index i = 0; i < chain.size(); ++i) {
    write_csv(dir / w_file_name(i), w_header,
              chain.samples[static_cast<std::size_t>(i)].w);
  }
}

ChainBundle load_chain(const std::filesystem::path& dir) {
  const MetaReader meta(dir / "meta");
  if (static_cast<int>(meta.num("format_version")) != kFormatVersion) {
    throw DataError("unsupported chain bundle format version");
  }
  const auto n = static_cast<Index>(meta.num("n"));
  const auto d = static_cast<Index>(meta.num("d"));
  const auto q = static_cast<Index>(meta.num("q"));
  const auto latent_dim = static_cast<Index>(meta.num("latent_dim"));
  const auto layers = static_cast<int>(meta.num("layers"));
  const auto sample_count = static_cast<Index>(meta.num("sample_count"));

  ChainBundle bundle;
  Chain& chain = bundle.chain;
  chain.config.iterations = static_cast<Index>(meta.num("iterations"));
  chain.config.burn_in = static_cast<Index>(meta.num("burn_in"));
  chain.config.thinning = static_cast<Index>(meta.num("thinning"));
  chain.config.proposal_l = meta.num("proposal_l");
  chain.config.proposal_u = meta.num("proposal_u");
  chain.config.seed = meta.u64("seed");
  chain.config.jitter = meta.num("jitter");
  chain.config.ess_max_shrinks = static_cast<Index>(meta.num("ess_max_shrinks"));
  chain.priors.shape = meta.num("prior_shape");
  chain.priors.rate_theta_y = meta.num("prior_rate_theta_y");
  chain.priors.rate_theta_w = meta.num("prior_rate_theta_w");
  chain.diagnostics.accept_theta_w = meta.num("accept_theta_w");
  chain.diagnostics.accept_theta_y = meta.num("accept_theta_y");
  chain.diagnostics.mean_ess_shrinks = meta.num("mean_ess_shrinks");
  chain.diagnostics.likelihood_failures =
      static_cast<Index>(meta.num("likelihood_failures"));

  chain.meta.n = n;
  chain.meta.d = d;
  chain.meta.q = q;
  chain.meta.latent_dim = latent_dim;
  chain.meta.layers = layers;
  chain.meta.x_lower = meta.vec("x_lower", d);
  chain.meta.x_upper = meta.vec("x_upper", d);
  chain.meta.y_center = meta.vec("y_center", q);
  chain.meta.y_scale = meta.vec("y_scale", q);

  const CsvTable x_table = read_csv(dir / "x.csv");
  const CsvTable y_table = read_csv(dir / "y.csv");
  if (x_table.values.rows() != n || x_table.values.cols() != d ||
      y_table.values.rows() != n || y_table.values.cols() != q) {
    throw DataError("chain bundle: training data shape mismatch");
  }
  bundle.train =
      Dataset::with_scaling(x_table.values, y_table.values, chain.meta.x_lower,
                            chain.meta.x_upper, chain.meta.y_center,
                            chain.meta.y_scale);

  const CsvTable theta_table = read_csv(dir / "thetas.csv");
  if (theta_table.values.rows() != sample_count ||
      theta_table.values.cols() != 2) {
    throw DataError("chain bundle: thetas.csv shape mismatch");
  }

  const bool deep = (layers == 2);
  const Mat dist2_x = pairwise_sqdist(bundle.train.x_unit);
  chain.samples.reserve(static_cast<std::size_t>(sample_count));
  for (Index i = 0; i < sample_count; ++i) {
    ChainSample s;
    s.theta_w = theta_table.values(i, 0);
    s.theta_y = theta_table.values(i, 1);
    const CsvTable w_table = read_csv(dir / w_file_name(i));
    if (w_table.values.rows() != n || w_table.values.cols() != latent_dim) {
      throw DataError("chain bundle: latent matrix shape mismatch in " +
                      w_file_name(i));
    }
    s.w = w_table.values;
    if (deep) {
      const SpdFactor kw =
          factorize_kernel_sqdist(dist2_x, s.theta_w, chain.config.jitter);
      s.b_hat_w = gls_coreg(s.w, kw);
    }
    const SpdFactor ky = factorize_kernel(s.w, s.theta_y, chain.config.jitter);
    s.b_hat_y = gls_coreg(bundle.train.y_std, ky);
    chain.samples.push_back(std::move(s));
  }
  return bundle;
}

}  // namespace dicm
