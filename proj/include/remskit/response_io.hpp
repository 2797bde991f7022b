// SPDX-License-Identifier: Apache-2.0
#pragma once

// Text formats for plane-wave response sets and sampled kernel bundles.
// Both start with a header:
//   frequency_hz,<f>
//   grid,latlon,<n_theta>,<n_phi>
//   ports,<M>
// Lines starting with '#' are comments. Ports are numbered from 1; polarizations are "theta" / "phi".
//
// Response records:
//   port,<theta_deg>,<phi_deg>,<pol>,<m>,<re_b>,<im_b>
//   transmit,<theta_deg>,<phi_deg>,<m>,<re_t>,<im_t>,<re_p>,<im_p>      (optional)
//   coupling,<m>,<n>,<re>,<im>                                          (optional)
//   scatter,<theta_deg>,<phi_deg>,<pol>                                 (starts a block)
//   <theta_out_deg>,<phi_out_deg>,<re_s_theta>,<im_s_theta>,<re_s_phi>,<im_s_phi>
//
// Kernel bundle records:
//   coupling,<m>,<n>,<re>,<im>
//   tx,<theta_deg>,<phi_deg>,<m>,<re_t>,<im_t>,<re_p>,<im_p>
//   rx,<theta_deg>,<phi_deg>,<m>,<re_t>,<im_t>,<re_p>,<im_p>
//   scatter,<i_out>,<i_in>,<tt_re>,<tt_im>,<tp_re>,<tp_im>,<pt_re>,<pt_im>,<pp_re>,<pp_im>   (grid indices from 0)

#include <string>
#include <string_view>

#include "remskit/radiating.hpp"

namespace remskit {

PlaneWaveResponseSet parse_response_file(std::string_view text);
std::string format_response_file(const PlaneWaveResponseSet& resp);

RadiatingStructure parse_kernel_bundle(std::string_view text);
std::string format_kernel_bundle(const RadiatingStructure& s);

}  // namespace remskit
