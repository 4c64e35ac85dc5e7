#include "jscc/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace jscc::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

const json& need(const json& j, const char* key, const char* ctx) {
  if (!j.is_object() || !j.contains(key)) {
    std::ostringstream os;
    os << ctx << ": missing required key \"" << key << "\"";
    fail(os.str());
  }
  return j.at(key);
}

double need_number(const json& j, const char* key, const char* ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_number()) {
    std::ostringstream os;
    os << ctx << ": \"" << key << "\" must be a number";
    fail(os.str());
  }
  return v.get<double>();
}

int need_int(const json& j, const char* key, const char* ctx, int fallback,
             bool required) {
  if (!j.is_object() || !j.contains(key)) {
    if (required) {
      std::ostringstream os;
      os << ctx << ": missing required key \"" << key << "\"";
      fail(os.str());
    }
    return fallback;
  }
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    std::ostringstream os;
    os << ctx << ": \"" << key << "\" must be a positive integer";
    fail(os.str());
  }
  return static_cast<int>(v.get<long long>());
}

Eigen::MatrixXd matrix_from(const json& j, const char* ctx) {
  const json& m = need(j, "matrix", ctx);
  if (!m.is_array() || m.empty()) {
    std::ostringstream os;
    os << ctx << ": \"matrix\" must be a nonempty array of rows";
    fail(os.str());
  }
  const std::size_t rows = m.size();
  std::size_t cols = 0;
  Eigen::MatrixXd out;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = m.at(i);
    if (!row.is_array() || row.empty()) {
      std::ostringstream os;
      os << ctx << ": matrix row " << i << " must be a nonempty array";
      fail(os.str());
    }
    if (i == 0) {
      cols = row.size();
      out.resize(static_cast<Eigen::Index>(rows),
                 static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      std::ostringstream os;
      os << ctx << ": matrix row " << i << " has " << row.size()
         << " entries, expected " << cols;
      fail(os.str());
    }
    for (std::size_t k = 0; k < cols; ++k) {
      const json& cell = row.at(k);
      if (!cell.is_number()) {
        std::ostringstream os;
        os << ctx << ": matrix entry (" << i << ", " << k
           << ") must be a number";
        fail(os.str());
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          cell.get<double>();
    }
  }
  return out;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path + ": cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(path + ": " + e.what());
  }
  return j;
}

markov::TransitionMatrix chain_from_json(const json& j) {
  return markov::TransitionMatrix{matrix_from(j, "chain")};
}

markov::NonHiddenChain pair_chain_from_json(const json& j) {
  markov::TransitionMatrix chain = chain_from_json(j);
  const int dim = static_cast<int>(chain.probs.rows());
  const int nz = need_int(j, "alphabet_z", "chain", 1, false);
  int nx = need_int(j, "alphabet_x", "chain", 0, false);
  if (nx == 0) {
    if (nz < 1 || dim % nz != 0) {
      std::ostringstream os;
      os << "chain: matrix dimension " << dim
         << " is not a multiple of alphabet_z = " << nz;
      fail(os.str());
    }
    nx = dim / nz;
  }
  return markov::check_non_hidden(chain, nx, nz);
}

dmc::DmcChannel dmc_from_json(const json& j) {
  dmc::DmcChannel ch{matrix_from(j, "channel")};
  dmc::validate_channel(ch);
  return ch;
}

rates::SourceSummary source_from_json(const json& j) {
  if (j.is_object() && j.contains("entropy")) {
    rates::SourceSummary s;
    s.entropy = need_number(j, "entropy", "source");
    s.varentropy = need_number(j, "varentropy", "source");
    return s;
  }
  if (j.is_object() && j.contains("matrix")) {
    const markov::NonHiddenChain chain = pair_chain_from_json(j);
    const markov::InfoRates rates = markov::info_rates(chain);
    return {rates.entropy, rates.varentropy};
  }
  fail("source: expected {\"entropy\", \"varentropy\"} or a chain object");
}

rates::ChannelSummary channel_from_json(const json& j) {
  const json& kind = need(j, "kind", "channel");
  if (!kind.is_string()) fail("channel: \"kind\" must be a string");
  const std::string k = kind.get<std::string>();
  rates::ChannelSummary out;
  if (k == "dmc") {
    out.kind = rates::ChannelKind::dmc;
    if (j.contains("matrix")) {
      const dmc::DmcChannel ch = dmc_from_json(j);
      const dmc::CapacityResult cap = dmc::capacity(ch);
      const dmc::DispersionExtremes ext = dmc::dispersion_extremes(ch, cap);
      out.capacity = cap.capacity;
      out.v_plus = ext.v_plus;
      out.v_minus = ext.v_minus;
    } else {
      out.capacity = need_number(j, "capacity", "channel");
      out.v_plus = need_number(j, "v_plus", "channel");
      out.v_minus = need_number(j, "v_minus", "channel");
    }
    return out;
  }
  if (k == "conditional_additive") {
    out.kind = rates::ChannelKind::conditional_additive;
    if (j.contains("noise")) {
      const markov::NonHiddenChain noise =
          pair_chain_from_json(j.at("noise"));
      const markov::InfoRates rates = markov::info_rates(noise);
      out.capacity =
          std::max(0.0, std::log(static_cast<double>(noise.nx)) -
                            rates.entropy);
      out.v_c = rates.varentropy;
    } else {
      out.capacity = need_number(j, "capacity", "channel");
      out.v_c = need_number(j, "v_c", "channel");
    }
    return out;
  }
  fail("channel: \"kind\" must be \"dmc\" or \"conditional_additive\"");
}

rates::RateProblem problem_from_json(const json& j) {
  rates::RateProblem p;
  p.source = source_from_json(need(j, "source", "problem"));
  p.channel = channel_from_json(need(j, "channel", "problem"));
  return p;
}

}  // namespace jscc::io
