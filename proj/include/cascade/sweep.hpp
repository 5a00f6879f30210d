#pragma once
#include <string>
#include <vector>

#include "cascade/config.hpp"

namespace cascade {

// A figure is one or more resolved sweeps sharing a CSV schema; the id fixes
// the parameters (fig2: variance growth with cavity loss; fig3/fig4: variance
// and two-mode correlation minima across the preparation asymmetry at several
// gains; fig5: brightness surface over drive and asymmetry; fig6: driven vs
// undriven brightness).
struct FigureJob {
    std::string id;
    std::vector<SweepSpec> sweeps;
};

// Resolve one of fig2..fig6 to its sweep list; throws std::invalid_argument
// for an unknown id.
FigureJob make_figure_job(const std::string& id);

// Header for the requested output subset; all rows carry the four parameters,
// the source route, and a status column.
std::string sweep_csv_header(SweepOutputs outputs);

// One row per grid point, in grid order (points may be evaluated in
// parallel).  Points that cannot be computed are kept with "nan" values and a
// telling status instead of being dropped; throws std::runtime_error if no
// point at all yields values.
std::string run_sweep(const SweepSpec& spec);

// Concatenated sweeps under a single header.
std::string run_figure_csv(const FigureJob& job);

}  // namespace cascade
