#pragma once

#include "ddflow/fe.hpp"
#include "ddflow/model.hpp"
#include "ddflow/types.hpp"

namespace ddflow {

/// Quadrature degree used by every assembler: exact for the P2 x P2 x grad P2
/// products of the trilinear forms on affine cells.
inline constexpr int kAssemblyDegree = 6;

// Index conventions: two-component P2 fields (velocity, scalar pair) are
// component-blocked; matrix rows are test functions, columns trial functions.

/// (psi_i, psi_j) per component, block diagonal for multi-component spaces.
SparseMatrix assemble_mass(const FESpace& space);

/// (grad psi_i, grad psi_j) per component.
SparseMatrix assemble_stiffness(const FESpace& space);

/// a(y; u, v) = (K^{-1} u, v) + (nu(T) grad u, grad v), T a scalar P2 field.
/// Throws ModelViolation if nu(T) <= 0 at a quadrature point.
SparseMatrix assemble_a(const FESpace& velocity, const Vector& T, const PhysicalModel& model);

/// b(v, q) = -(q, div v): rows pressure dofs, columns velocity dofs.
SparseMatrix assemble_b(const FESpace& velocity, const FESpace& pressure);

/// Skew form 1/2 [((w.grad) u, v) - ((w.grad) v, u)] as a matrix in (v, u)
/// for fixed transport field w. Antisymmetric by construction.
SparseMatrix assemble_c_skew(const FESpace& velocity, const Vector& w);

/// Derivative of the skew form in its transport slot: entry (v, psi) equals
/// skew(psi, u, v) for fixed u.
SparseMatrix assemble_c_skew_transport(const FESpace& velocity, const Vector& u);

/// a_y(y, s) = (D grad y, grad s) on the scalar pair space, including the
/// cross-diffusion blocks. Throws ModelViolation if sym(D) is not positive
/// definite.
SparseMatrix assemble_ay(const FESpace& pair, const PhysicalModel& model);

/// Skew transport 1/2 [((w.grad) y, s) - ((w.grad) s, y)] on the pair space.
SparseMatrix assemble_cy_skew(const FESpace& pair, const Vector& w);

/// Derivative of the scalar skew form in its transport slot: rows scalar
/// test functions, columns velocity directions; entry (s, psi) equals
/// skew_y(psi, y, s) for fixed y.
SparseMatrix assemble_cy_skew_transport(const FESpace& pair, const FESpace& velocity, const Vector& y);

/// d(y, v) = (F(y), v) as a load vector on the velocity space.
Vector assemble_buoyancy(const FESpace& velocity, const Vector& y, const PhysicalModel& model);

/// ((F_y(y)) chi, v): rows velocity, columns scalar pair.
SparseMatrix assemble_buoyancy_jacobian(const FESpace& velocity, const Vector& y, const PhysicalModel& model);

/// ((nu_T(T) chi) grad u, grad v): rows velocity, columns T dofs.
SparseMatrix assemble_viscosity_sensitivity(const FESpace& velocity, const Vector& u, const Vector& T,
                                            const PhysicalModel& model);

/// (U, v) for piecewise-constant U: rows velocity, columns control dofs
/// (component-blocked, one per cell).
SparseMatrix assemble_control_coupling(const FESpace& velocity, const FESpace& control);

/// (f, v) for an analytic two-component source.
Vector assemble_source(const FESpace& space, const VectorFunction& f);

/// Integrals of the P1 basis functions.
Vector assemble_pressure_mean(const FESpace& pressure);

/// Discrete harmonic extension (D = I) of boundary data into the scalar pair
/// space: equals y_D at boundary dofs.
Vector apply_lifting(const FESpace& pair, const VectorFunction& y_boundary);

}  // namespace ddflow
