#ifndef CHOICENET_SVG_HPP
#define CHOICENET_SVG_HPP

#include "choicenet/label_field.hpp"
#include "choicenet/predictor.hpp"

#include <string>

namespace choicenet {

/// d = 1: base function, network, hidden labels on X and spike footprints.
std::string overlay_svg(const LabelField& truth, const PredictionOutcome& outcome);

/// d = 2: heatmap of |network - base| with X marked.
std::string heatmap_svg(const LabelField& truth, const PredictionOutcome& outcome, int cells = 64);

}  // namespace choicenet

#endif  // CHOICENET_SVG_HPP
