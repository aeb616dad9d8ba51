#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "harnacklab/acf.hpp"
#include "harnacklab/bhi.hpp"
#include "harnacklab/chains.hpp"
#include "harnacklab/freeboundary.hpp"
#include "harnacklab/hypotheses.hpp"

namespace harnack {

using Json = nlohmann::ordered_json;

/// Finite doubles as numbers, everything else as null.
Json number(double x);

Json node_json(const Grid& grid, std::size_t node);

Json to_json(const HypothesisReport& report);
Json to_json(const HarnackChain& chain, const Grid& grid);
Json to_json(const TransferResult& transfer);
Json to_json(const BhiReport& report, const Grid& grid);
Json to_json(const AcfProfile& profile, const MonotoneVerdict& verdict);
Json to_json(const SubSuperResult& result);

/// Manifest of a free-boundary run; component files are named by the caller.
Json fb_manifest(const FbSolution& solution, const FbProblem& problem, const std::vector<std::string>& files);

/// Two-space indent, trailing newline.
std::string dump(const Json& j);

/// r,phi,alpha,ln_phi
std::string acf_csv(const AcfProfile& profile);
/// r,osc,decay_factor
std::string osc_csv(const std::vector<OscLevel>& levels);

/// %.17g, or "nan" / "inf" / "-inf".
std::string format_double(double x);

}  // namespace harnack
