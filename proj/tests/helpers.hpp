#pragma once

#include "ecosub/mpe_solver.hpp"

namespace testutil {

// Small solver settings for unit tests.
inline ecosub::SolverConfig small_solver() {
    ecosub::SolverConfig c;
    c.grid_n = 101;
    c.action_n = 51;
    return c;
}

// Solution with prescribed policies and values on a grid, no solving.
inline ecosub::EquilibriumSolution make_solution(int n, double (*sI)(double),
                                                 double (*sE)(double), double (*vI)(double),
                                                 double (*vE)(double)) {
    ecosub::EquilibriumSolution s;
    s.grid = {0.0, 1.0, n};
    for (int i = 0; i < n; ++i) {
        double m = s.grid.at(i);
        s.s_I.push_back(sI(m));
        s.s_E.push_back(sE(m));
        s.v_I.push_back(vI(m));
        s.v_E.push_back(vE(m));
    }
    s.converged = true;
    return s;
}

}  // namespace testutil
