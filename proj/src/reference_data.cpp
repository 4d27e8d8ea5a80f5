#include "flowtube/reference_data.hpp"

namespace flowtube::reference {

namespace {

// clang-format off
const SymRtdRun sym_runs[] = {
    {0.68, 0, 252, false, {1.18, 0.18, 0.13, 0.02}, {1.18, 0.18, 0.13, 0.02}},
    {0.95, 0, 109, false, {1.43, 0.23, 0.17, 0.01}, {1.44, 0.23, 0.17, 0.01}},
    {1.31, 0, 62, false, {1.89, 0.33, 0.23, 0.04}, {1.90, 0.33, 0.23, 0.04}},
    {1.56, 30, 252, false, {2.05, 0.10, 0.20, 0.02}, {2.05, 0.10, 0.19, 0.03}},
    {2.75, 100, 347, true, {3.37, 0.14, 0.24, 0.01}, {3.37, 0.14, 0.23, 0.01}},
    {2.75, 100, 347, true, {3.53, 0.40, 0.28, 0.03}, {3.53, 0.40, 0.27, 0.02}},
    {2.98, 30, 109, false, {3.63, 0.08, 0.28, 0.01}, {3.64, 0.07, 0.27, 0.01}},
    {3.61, 100, 252, false, {4.26, 0.15, 0.28, 0.02}, {4.25, 0.15, 0.27, 0.02}},
    {4.70, 300, 537, false, {5.53, 0.06, 0.29, 0.01}, {5.52, 0.06, 0.28, 0.01}},
    {4.90, 30, 62, false, {5.79, 0.14, 0.36, 0.01}, {5.81, 0.14, 0.36, 0.02}},
    {5.52, 100, 157, false, {6.27, 0.29, 0.40, 0.04}, {6.24, 0.29, 0.35, 0.03}},
    {6.17, 700, 917, false, {6.38, 0.11, 0.26, 0.00}, {6.38, 0.11, 0.25, 0.00}},
    {7.02, 300, 347, false, {7.66, 0.06, 0.33, 0.01}, {7.66, 0.07, 0.31, 0.02}},
    {7.71, 100, 109, false, {8.29, 0.12, 0.42, 0.07}, {8.29, 0.12, 0.39, 0.04}},
    {9.48, 300, 252, false, {9.97, 0.15, 0.35, 0.00}, {9.95, 0.11, 0.39, 0.03}},
    {10.21, 700, 537, false, {9.96, 0.10, 0.43, 0.06}, {9.96, 0.16, 0.34, 0.01}},
    {13.28, 100, 62, false, {14.72, 0.26, 0.61, 0.05}, {14.74, 0.25, 0.58, 0.05}},
    {14.95, 700, 347, false, {15.09, 0.18, 0.50, 0.03}, {15.08, 0.18, 0.47, 0.02}},
    {15.54, 300, 157, false, {15.55, 0.18, 0.57, 0.06}, {15.52, 0.18, 0.52, 0.05}},
    {21.23, 700, 252, false, {20.55, 0.12, 0.61, 0.02}, {20.51, 0.12, 0.55, 0.00}},
    {21.24, 300, 109, false, {21.65, 0.09, 0.69, 0.03}, {21.60, 0.09, 0.61, 0.01}},
    {33.80, 700, 157, false, {32.54, 0.14, 0.87, 0.04}, {32.46, 0.13, 0.78, 0.02}},
    {37.21, 300, 62, false, {39.91, 0.16, 1.18, 0.08}, {39.78, 0.17, 1.06, 0.07}},
    {48.30, 700, 109, false, {46.99, 0.28, 1.28, 0.16}, {46.84, 0.29, 1.14, 0.12}},
    {85.08, 700, 62, false, {88.03, 0.32, 2.34, 0.21}, {87.56, 0.36, 1.96, 0.16}},
};

const AsymRtdRun asym_runs[] = {
    {0.68, 0, 252, {1.01, 0.13, 0.26, 0.03, 303.28, 600.45, 1.35, 0.19, 1.21}, {1.00, 0.14, 0.26, 0.03, 262.52, 518.15, 1.35, 0.19, 1.21}},
    {0.95, 0, 109, {1.25, 0.23, 0.29, 0.02, 39.51, 96.68, 1.60, 0.23, 1.48}, {1.24, 0.24, 0.30, 0.04, 221.93, 374.13, 1.60, 0.23, 1.48}},
    {1.31, 0, 62, {1.66, 0.31, 0.38, 0.06, 2.91, 1.46, 2.03, 0.34, 1.95}, {1.66, 0.31, 0.39, 0.07, 3.20, 1.55, 2.07, 0.33, 1.96}},
    {1.56, 30, 252, {1.85, 0.12, 0.32, 0.05, 2.72, 0.72, 2.24, 0.09, 2.09}, {1.84, 0.13, 0.34, 0.07, 35.27, 71.57, 2.24, 0.09, 2.11}},
    {2.98, 30, 109, {3.35, 0.09, 0.46, 0.04, 2.67, 0.33, 3.80, 0.00, 3.69}, {3.36, 0.08, 0.47, 0.04, 3.01, 0.24, 3.80, 0.00, 3.71}},
    {3.61, 100, 252, {4.00, 0.16, 0.42, 0.05, 2.28, 0.98, 4.45, 0.10, 4.31}, {4.00, 0.16, 0.42, 0.05, 2.28, 0.98, 4.45, 0.10, 4.31}},
    {4.70, 300, 537, {5.24, 0.07, 0.45, 0.03, 2.64, 0.34, 5.64, 0.09, 5.58}, {5.24, 0.07, 0.45, 0.03, 2.64, 0.34, 5.64, 0.09, 5.58}},
    {4.90, 30, 62, {5.45, 0.14, 0.56, 0.04, 2.23, 0.41, 5.94, 0.15, 5.85}, {5.44, 0.14, 0.59, 0.06, 2.67, 0.46, 5.94, 0.15, 5.89}},
    {5.52, 100, 157, {5.87, 0.28, 0.64, 0.06, 2.59, 0.27, 6.45, 0.30, 6.35}, {5.87, 0.27, 0.63, 0.07, 3.59, 0.41, 6.40, 0.28, 6.35}},
    {6.17, 700, 917, {6.36, 0.11, 0.25, 0.00, 0.10, 0.00, 6.52, 0.11, 6.38}, {6.36, 0.11, 0.25, 0.00, 0.10, 0.00, 6.52, 0.11, 6.38}},
    {7.02, 300, 347, {7.38, 0.08, 0.45, 0.02, 1.78, 0.12, 7.80, 0.00, 7.69}, {7.38, 0.08, 0.45, 0.02, 1.78, 0.12, 7.80, 0.00, 7.69}},
    {7.71, 100, 109, {7.92, 0.13, 0.61, 0.13, 2.29, 0.77, 8.45, 0.10, 8.37}, {7.92, 0.13, 0.61, 0.13, 2.29, 0.77, 8.45, 0.10, 8.37}},
    {9.48, 300, 252, {9.63, 0.16, 0.54, 0.02, 2.22, 0.20, 10.12, 0.18, 10.03}, {9.57, 0.14, 0.60, 0.09, 2.11, 0.37, 10.07, 0.10, 10.01}},
    {10.21, 700, 537, {9.55, 0.15, 0.66, 0.13, 2.13, 0.45, 10.13, 0.16, 10.03}, {9.63, 0.16, 0.54, 0.02, 2.36, 0.23, 10.08, 0.11, 10.02}},
    {13.28, 100, 62, {14.11, 0.32, 0.97, 0.15, 2.52, 0.73, 14.90, 0.26, 14.83}, {14.17, 0.30, 0.93, 0.10, 2.49, 0.28, 14.95, 0.19, 14.86}},
    {14.95, 700, 347, {14.61, 0.13, 0.78, 0.08, 2.24, 0.29, 15.30, 0.26, 15.18}, {14.62, 0.15, 0.74, 0.06, 2.30, 0.31, 15.20, 0.16, 15.17}},
    {15.54, 300, 157, {15.03, 0.22, 0.84, 0.12, 1.91, 0.32, 15.72, 0.18, 15.62}, {15.04, 0.21, 0.78, 0.12, 2.03, 0.54, 15.68, 0.23, 15.60}},
    {21.23, 700, 252, {19.96, 0.12, 0.96, 0.06, 2.28, 0.30, 20.65, 0.10, 20.65}, {19.97, 0.13, 0.86, 0.02, 2.26, 0.12, 20.60, 0.16, 20.60}},
    {21.24, 300, 109, {20.97, 0.11, 1.08, 0.06, 2.32, 0.18, 21.85, 0.10, 21.77}, {21.01, 0.10, 0.94, 0.05, 2.22, 0.28, 21.75, 0.19, 21.70}},
    {33.80, 700, 157, {31.67, 0.09, 1.41, 0.10, 2.52, 0.20, 32.73, 0.12, 32.72}, {31.69, 0.10, 1.25, 0.06, 2.49, 0.24, 32.60, 0.20, 32.62}},
    {37.21, 300, 62, {38.68, 0.23, 2.02, 0.16, 3.01, 0.11, 39.70, 0.35, 40.21}, {38.67, 0.22, 1.80, 0.13, 3.00, 0.26, 39.85, 0.10, 40.04}},
    {48.30, 700, 109, {45.65, 0.37, 2.19, 0.34, 3.12, 0.51, 46.95, 0.34, 47.32}, {45.66, 0.35, 1.92, 0.32, 2.84, 0.47, 47.00, 0.33, 47.10}},
    {85.08, 700, 62, {85.45, 0.41, 4.40, 0.38, 4.70, 0.73, 87.45, 0.62, 88.89}, {85.42, 0.39, 3.59, 0.35, 4.00, 0.65, 87.35, 0.44, 88.20}},
};

using K = KineticKind;

const SpeciesRecord species[] = {
    // products
    {"C5H10O2", "C5H11O2", K::product, 0.15, 0.39, 0.0},
    {"C6H12O2", "C6H13O2", K::product, 0.19, 0.50, 0.0},
    {"C2H4O3", "C2H5O3", K::product, 0.20, 0.51, 0.0},
    {"CH2O2", "CH3O2", K::product, 0.21, 0.55, 0.0},
    {"C2H6O3", "C2H7O3", K::product, 0.22, 0.57, 0.0},
    {"C2H4O2", "C2H5O2", K::product, 0.22, 0.58, 0.0},
    {"C4H8O3", "C4H9O3", K::product, 0.23, 0.60, 0.0},
    {"C3H6O3", "C3H7O3", K::product, 0.25, 0.66, 0.0},
    {"CH3OH(H2O)", "CH7O2", K::product, 0.26, 0.67, 0.0},
    {"NO2", "HNO2", K::product, 0.26, 0.67, 0.0},
    {"C2H6O2", "C2H7O2", K::product, 0.27, 0.69, 0.0},
    {"CH4O", "CH5O", K::product, 0.27, 0.70, 0.0},
    {"C2H2O", "C2H3O", K::product, 0.27, 0.70, 0.0},
    {"C6H10O2", "C6H11O2", K::product, 0.28, 0.72, 0.0},
    {"C3H6O2", "C3H7O2", K::product, 0.30, 0.77, 0.0},
    {"C4H6O2", "C4H7O2", K::product, 0.31, 0.80, 0.0},
    {"C2H4O", "C2H5O", K::product, 0.31, 0.81, 0.0},
    {"C3H4O2", "C3H5O2", K::product, 0.31, 0.81, 0.0},
    {"C3H8O2", "C3H9O2", K::product, 0.31, 0.81, 0.0},
    {"C6H12O", "C6H13O", K::product, 0.31, 0.81, 0.0},
    {"CH4O2", "CH5O2", K::product, 0.32, 0.82, 0.0},
    {"C3H4O", "C3H5O", K::product, 0.33, 0.84, 0.0},
    {"C3H9NO", "C3H10NO", K::product, 0.33, 0.86, 0.0},
    {"CH2O", "CH3O", K::product, 0.35, 0.91, 0.0},
    {"C3H6O", "C3H7O", K::product, 0.36, 0.92, 0.0},
    {"C3H6O+ (ion)", "C3H6O", K::product, 0.43, 1.10, 0.0},
    {"C6H10O", "C6H11O", K::product, 0.42, 1.10, 0.0},
    {"C4H8O", "C4H9O", K::product, 0.47, 1.21, 0.0},
    {"C5H8O", "C5H9O", K::product, 0.54, 1.41, 0.0},
    // reactants
    {"C3H4", "C3H5", K::reactant, 0.19, 0.48, 0.0},
    {"C6H11", "C6H12", K::reactant, 0.25, 0.63, 0.0},
    {"C3H6", "C3H7", K::reactant, 0.31, 0.80, 0.0},
    {"C5H8", "C5H9", K::reactant, 0.34, 0.87, 0.0},
    {"C6H12", "C6H13", K::reactant, 0.39, 1.00, 0.0},
    // intermediate
    {"CH3O2", "CH4O2", K::intermediate, 0.93, 0.0, 0.39},
};
// clang-format on

} // namespace

std::span<const SymRtdRun> symmetric_rtd_runs() { return sym_runs; }
std::span<const AsymRtdRun> asymmetric_rtd_runs() { return asym_runs; }
std::span<const SpeciesRecord> ozonolysis_species() { return species; }

} // namespace flowtube::reference
