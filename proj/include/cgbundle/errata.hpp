#pragma once

// Literal evaluations of ambiguous printed index expressions, so each reading
// can be scored against the Koszul oracle instead of being silently resolved.

#include "cgbundle/tensor_bundle.hpp"

namespace cgb::errata {

/// Raised curvature in the first family of nabla_{e_(t,l)} e_j:
/// R_j^{sl r} = g^{ss'} g^{ll'} R_{j s' l'}^r or R^{sl}_j^r = g^{ss'} g^{ll'} R_{s' l' j}^r.
enum class RaisedCurvature { j_first, j_last };

/// nabla_{e_(t,l)} e_j, horizontal part only (block VH->H); every other entry zero.
ConnectionCoefficients vertical_horizontal(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                           RaisedCurvature reading);

/// Role of the free lower index of R^{sj}_l^r in nabla e_(i,j): either l is the
/// direction (nabla_{e_l} e_(i,j)), or l and i trade places (nabla_{e_i} e_(l,j)).
enum class DirectionReading { direction_l, direction_i };

/// Horizontal part of nabla_{e_l} e_(i,j) (block HV->H); every other entry zero.
ConnectionCoefficients horizontal_vertical(const Chart& chart, const CGParams& params, const BundlePoint& p,
                                           DirectionReading reading);

}  // namespace cgb::errata
