#ifndef DWELL_DWELL_HPP
#define DWELL_DWELL_HPP

#include "dwell/classical.hpp"
#include "dwell/config.hpp"
#include "dwell/eigen_oracle.hpp"
#include "dwell/fft.hpp"
#include "dwell/grid.hpp"
#include "dwell/model.hpp"
#include "dwell/observe.hpp"
#include "dwell/runner.hpp"
#include "dwell/spectrum.hpp"
#include "dwell/split_operator.hpp"
#include "dwell/wavefunction.hpp"

#endif // DWELL_DWELL_HPP
