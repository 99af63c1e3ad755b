#include "usm/channel.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "usm/rng.hpp"

namespace usm {

void Scenario::validate() const {
  if (n_t < 1 || n_r < 1 || m < 1)
    throw InvalidInput("scenario: antenna/element counts must be positive");
  if (bandwidth_hz <= 0 || carrier_hz <= 0 || tx_power_mw <= 0)
    throw InvalidInput("scenario: powers and frequencies must be positive");
  if (rician_k < 0) throw InvalidInput("scenario: rician_k must be >= 0");
}

double Scenario::noise_power_dbm() const {
  return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz);
}

double Scenario::snr_linear() const {
  double sigma2_mw = std::pow(10.0, noise_power_dbm() / 10.0);
  return tx_power_mw / sigma2_mw;
}

double path_loss_db(double pl0_db, double alpha, double d) {
  return pl0_db + alpha * 10.0 * std::log10(d);
}

namespace {

double dist(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Half-wavelength ULA steering vector for the azimuth of direction (to-from).
Eigen::VectorXcd steering(int n, const std::array<double, 3>& from,
                          const std::array<double, 3>& to) {
  double az = std::atan2(to[1] - from[1], to[0] - from[0]);
  Eigen::VectorXcd a(n);
  for (int k = 0; k < n; ++k) a(k) = std::polar(1.0, M_PI * k * std::sin(az));
  return a;
}

}  // namespace

MimoChannel gen_channels(const Scenario& scn, uint64_t seed) {
  scn.validate();
  const double d_tx_ris = dist(scn.tx_pos, scn.ris_pos);
  const double d_ris_rx = dist(scn.ris_pos, scn.rx_pos);
  const double d_direct = dist(scn.tx_pos, scn.rx_pos);

  const double amp_f =
      std::pow(10.0, -path_loss_db(scn.pl0_db, scn.alpha_ris, d_ris_rx) / 20.0);
  const double amp_g =
      std::pow(10.0, -path_loss_db(scn.pl0_db, scn.alpha_ris, d_tx_ris) / 20.0);
  const double amp_d = std::pow(
      10.0, -path_loss_db(scn.pl0_db, scn.alpha_direct, d_direct) / 20.0);

  double los_w, nlos_w;
  if (std::isinf(scn.rician_k)) {
    los_w = 1.0;
    nlos_w = 0.0;
  } else {
    los_w = std::sqrt(scn.rician_k / (scn.rician_k + 1.0));
    nlos_w = std::sqrt(1.0 / (scn.rician_k + 1.0));
  }

  CMatrix los_f = steering(scn.n_r, scn.rx_pos, scn.ris_pos) *
                  steering(scn.m, scn.ris_pos, scn.rx_pos).adjoint();
  CMatrix los_g = steering(scn.n_t, scn.tx_pos, scn.ris_pos) *
                  steering(scn.m, scn.ris_pos, scn.tx_pos).adjoint();

  CounterRng rng_f(stream_key(seed, 1));
  CounterRng rng_g(stream_key(seed, 2));
  CounterRng rng_d(stream_key(seed, 3));

  MimoChannel ch;
  ch.f = amp_f * (los_w * los_f + nlos_w * rng_f.cgaussian_matrix(scn.n_r, scn.m));
  ch.g = amp_g * (los_w * los_g + nlos_w * rng_g.cgaussian_matrix(scn.n_t, scn.m));
  ch.h_d = amp_d * rng_d.cgaussian_matrix(scn.n_r, scn.n_t);
  ch.snr_linear = scn.snr_linear();
  return ch;
}

CMatrix h_eq(const MimoChannel& ch, const CMatrix& theta) {
  if (theta.rows() != ch.f.cols() || theta.cols() != ch.g.cols())
    throw DimensionError("h_eq: theta dimension mismatch");
  return ch.h_d + ch.f * theta * ch.g.adjoint();
}

namespace {

template <class T>
void set_field(T& field, const std::string& value, const std::string& key) {
  std::istringstream ss(value);
  if (!(ss >> field)) throw InvalidInput("scenario: bad value for " + key);
}

void set_vec(std::array<double, 3>& field, const std::string& value,
             const std::string& key) {
  std::istringstream ss(value);
  char c1, c2;
  if (!(ss >> field[0] >> c1 >> field[1] >> c2 >> field[2]) || c1 != ',' ||
      c2 != ',')
    throw InvalidInput("scenario: bad 3-vector for " + key);
}

}  // namespace

Scenario Scenario::parse(std::istream& in) {
  Scenario scn;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("scenario: expected key=value, got '" + line + "'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "n_t") set_field(scn.n_t, value, key);
    else if (key == "n_r") set_field(scn.n_r, value, key);
    else if (key == "m") set_field(scn.m, value, key);
    else if (key == "tx_pos") set_vec(scn.tx_pos, value, key);
    else if (key == "rx_pos") set_vec(scn.rx_pos, value, key);
    else if (key == "ris_pos") set_vec(scn.ris_pos, value, key);
    else if (key == "rician_k") set_field(scn.rician_k, value, key);
    else if (key == "alpha_ris") set_field(scn.alpha_ris, value, key);
    else if (key == "alpha_direct") set_field(scn.alpha_direct, value, key);
    else if (key == "pl0_db") set_field(scn.pl0_db, value, key);
    else if (key == "carrier_hz") set_field(scn.carrier_hz, value, key);
    else if (key == "bandwidth_hz") set_field(scn.bandwidth_hz, value, key);
    else if (key == "tx_power_mw") set_field(scn.tx_power_mw, value, key);
    else if (key == "noise_psd_dbm_hz") set_field(scn.noise_psd_dbm_hz, value, key);
    else throw InvalidInput("scenario: unknown key '" + key + "'");
  }
  scn.validate();
  return scn;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return parse(in);
}

void Scenario::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path);
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "n_t=" << n_t << "\nn_r=" << n_r << "\nm=" << m << '\n';
  out << "tx_pos=" << num(tx_pos[0]) << ',' << num(tx_pos[1]) << ','
      << num(tx_pos[2]) << '\n';
  out << "rx_pos=" << num(rx_pos[0]) << ',' << num(rx_pos[1]) << ','
      << num(rx_pos[2]) << '\n';
  out << "ris_pos=" << num(ris_pos[0]) << ',' << num(ris_pos[1]) << ','
      << num(ris_pos[2]) << '\n';
  out << "rician_k=" << num(rician_k) << '\n';
  out << "alpha_ris=" << num(alpha_ris) << '\n';
  out << "alpha_direct=" << num(alpha_direct) << '\n';
  out << "pl0_db=" << num(pl0_db) << '\n';
  out << "carrier_hz=" << num(carrier_hz) << '\n';
  out << "bandwidth_hz=" << num(bandwidth_hz) << '\n';
  out << "tx_power_mw=" << num(tx_power_mw) << '\n';
  out << "noise_psd_dbm_hz=" << num(noise_psd_dbm_hz) << '\n';
}

}  // namespace usm
