#ifndef USM_CHANNEL_HPP
#define USM_CHANNEL_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "usm/types.hpp"

namespace usm {

/// BD-RIS assisted MIMO simulation scenario. Defaults follow a 2x2 link with
/// the surface close to the receiver; distances in meters.
struct Scenario {
  int n_t = 2;
  int n_r = 2;
  int m = 16;
  std::array<double, 3> tx_pos = {0.0, 0.0, 1.5};
  std::array<double, 3> rx_pos = {50.0, 0.0, 1.5};
  std::array<double, 3> ris_pos = {50.0, 3.0, 3.0};
  double rician_k = 3.0;
  double alpha_ris = 2.0;
  double alpha_direct = 3.75;  // 8 when the direct link is blocked
  double pl0_db = 28.0;
  double carrier_hz = 2.4e9;
  double bandwidth_hz = 20e6;
  double tx_power_mw = 100.0;
  double noise_psd_dbm_hz = -174.0;

  void validate() const;

  double noise_power_dbm() const;  // -174 + 10 log10(B)
  double snr_linear() const;       // P / sigma^2

  /// Flat key=value text; unknown keys are errors.
  static Scenario parse(std::istream& in);
  static Scenario load(const std::string& path);
  void save(const std::string& path) const;
};

struct MimoChannel {
  CMatrix h_d;  // N_r x N_t direct link
  CMatrix f;    // N_r x M, RIS -> Rx
  CMatrix g;    // N_t x M, Tx -> RIS
  double snr_linear = 1.0;

  int n_r() const { return static_cast<int>(h_d.rows()); }
  int n_t() const { return static_cast<int>(h_d.cols()); }
  int m() const { return static_cast<int>(f.cols()); }
};

/// Path loss in dB at distance d (meters): pl0 + alpha * 10 log10(d).
double path_loss_db(double pl0_db, double alpha, double d);

/// Rician channels through the RIS (deterministic ULA line-of-sight plus
/// CN(0,1) scattering) and a Rayleigh direct link, all scaled by amplitude
/// path-loss factors. Deterministic per (scenario, seed).
MimoChannel gen_channels(const Scenario& scn, uint64_t seed);

/// Equivalent channel H_d + F Theta G^H.
CMatrix h_eq(const MimoChannel& ch, const CMatrix& theta);

}  // namespace usm

#endif
