#pragma once

#include "carnot/field_forms.hpp"
#include "carnot/forms.hpp"

namespace carnot {

// 2-cocycle data for a central extension: a closed, grading-compatible
// V-valued 2-form on the base algebra.
struct Cocycle {
  AlgebraPtr base;           // H
  GradedVectorSpace values;  // V, graded inner-product space
  AlgebraForm form;          // degree 2, V-valued over base

  static Cocycle make(AlgebraPtr base, GradedVectorSpace values,
                      AlgebraForm form);
};

// Central extension V -> G -> H by a cocycle, with the derived Carnot
// structure. The derived basis is layer-major with the V vectors appended
// after the H vectors inside each layer.
struct CentralExtension {
  Cocycle cocycle;
  AlgebraPtr base;     // H
  AlgebraPtr derived;  // G = H + V
  QMat inclusion;      // dim_G x dim_V, iota_*
  QMat projection;     // dim_H x dim_G, pi_*
  QMat section;        // dim_G x dim_H, isometric section of pi_*
  ValidationReport report;  // Def.-by-clause validation of the result
  bool carnot = false;      // stratification-onto holds for G

  int dim_v() const { return cocycle.values.dim; }
  // V-components of a derived-algebra coefficient vector.
  QVec v_part(const QVec& g) const;
  DVec v_part(const DVec& g) const;
  // H-components (projection).
  QVec h_part(const QVec& g) const;
  DVec h_part(const DVec& g) const;
  // Assemble a derived point from base + V parts.
  QVec assemble(const QVec& h, const QVec& v) const;
  DVec assemble(const DVec& h, const DVec& v) const;
};

// Build the extension; throws NotClosed / GradingIncompatible /
// NotStratified (the latter when the base is invalid). A derived algebra
// that fails only stratification-onto is returned with carnot = false.
CentralExtension extend(const AlgebraPtr& base, const Cocycle& rho);

// Convenience: extension by a scalar cocycle placed in the given layer.
CentralExtension extend_scalar(const AlgebraPtr& base, const AlgebraForm& rho,
                               int value_layer, const std::string& name = "V");

// Lemma on homomorphisms of central extensions: find mu with
// phi o rho1 - L^* rho2 = d0 mu and assemble psi(X+Y) = L X + (mu X + phi Y).
struct HomLift {
  QMat psi;  // dim_G2 x dim_G1 Lie algebra homomorphism
  QMat mu;   // dim_V2 x dim_H1
  // Dimension of the space of graded maps theta: H1 -> V2 killing [H1,H1];
  // psi is unique among graded lifts iff this is zero.
  int graded_ambiguity_dim = 0;
};
std::optional<HomLift> homomorphism_lift(const CentralExtension& ext1,
                                         const CentralExtension& ext2,
                                         const QMat& l, const QMat& phi);

// Normalization: an isomorphic extension whose cocycle components lie in E0
// and are pairwise orthogonal, with the certificate phi o rho - rho~ = d0 w.
struct NormalizedCocycle {
  CentralExtension extension;
  QMat phi;           // invertible, graded, dim_V x dim_V
  AlgebraForm omega;  // V-valued 1-form on the base
};
NormalizedCocycle normalize_cocycle(const CentralExtension& ext);

// Pushforward along a graded linear map phi: V1 -> V2: the extension of the
// same base by phi o rho with values im(phi), plus the surjective graded
// homomorphism psi(X+Y) = X + phi(Y).
struct PushforwardExtension {
  CentralExtension extension;
  QMat psi;            // dim_Ghat x dim_G1
  QMat image_basis;    // dim_V2 x dim_im(phi), columns = chosen basis
};
PushforwardExtension pushforward_extension(const CentralExtension& ext,
                                           const QMat& phi,
                                           const GradedVectorSpace& target);

// Split off the horizontal part W = V^[1] as an abelian factor; the reduced
// extension has rank(G) = rank(H). Errors with GradingIncompatible if the
// cocycle has a W-component.
struct AbelianSplit {
  CentralExtension reduced;
  GradedVectorSpace abelian_factor;  // W = V^[1]
  std::vector<int> kept_value_indices;
};
AbelianSplit abelian_factor_split(const CentralExtension& ext);

// Potential alpha with d alpha = rho (Lemma on horizontal lifts); the
// V-component of a horizontal lift from the identity is the alpha-integral.
FieldForm alpha_potential(const CentralExtension& ext);

}  // namespace carnot
