#pragma once

#include <map>
#include <mutex>

#include "nfarray/emission.hpp"

namespace nfa::test {

inline FiberSpec default_fiber() { return FiberSpec{250e-9, 1.45, 1.0}; }

inline HyperfineTransition cesium() { return cesium_d2_default(); }

inline double default_r() { return default_fiber().radius + 200e-9; }

// One atom model per distance, built once per test binary.
inline const AtomModel& model_at(double r) {
    static std::map<double, AtomModel> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(r);
    if (it == cache.end()) it = cache.emplace(r, build_atom_model(default_fiber(), cesium(), r)).first;
    return it->second;
}

inline const AtomModel& default_model() { return model_at(default_r()); }

}  // namespace nfa::test
