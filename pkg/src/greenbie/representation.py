"""Boundary-integral representation of the smooth remainder H = G - G0 and
the linear residual operators of its boundary / jump conditions.

The same operators drive both the training losses (squared residuals) and
the dense collocation references (residuals set to zero), so the two
routes share kernels and quadrature exactly and differ only in how the
densities are produced.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, potentials


@dataclass(frozen=True, eq=False)
class SingleDomainOperators:
    """H = D[h] on one curve; residual R(x) = B h(x) + g0(x, nodes)."""

    op: object
    scheme: object
    side: str  # which boundary limit the problem kind needs

    @property
    def limit_matrix(self):
        return potentials.dlp_boundary_limit_matrix(self.op, self.scheme, self.side)

    def rhs(self, x_batch):
        """g0(x_i, node_j) for the boundary condition H = -G0."""
        x = np.atleast_2d(x_batch)[:, None, :]
        return kernels.g0(self.op, x, self.scheme.curve.nodes[None, :, :])

    def eval_matrix(self, targets):
        """H(x, targets) = (eval_matrix @ h(x, nodes))."""
        return potentials.dlp_matrix(self.op, self.scheme, targets)


def make_single_domain_operators(op, domain):
    side = "interior" if domain.kind == "interior" else "exterior"
    scheme = potentials.make_scheme(domain.curve)
    return SingleDomainOperators(op=op, scheme=scheme, side=side)


@dataclass(frozen=True, eq=False)
class InterfaceOperators:
    """Representation split across the interface Gamma1 (and outer Gamma2).

        H(x, y) = S1[h1](y)                         y in region 1
        H(x, y) = S2[h2](y) + D2[h3](y)             y in region 2

    Residuals, all zero for the true Green's function:

        R1 = S2 h2 + Dc h3 - S1 h1 + (g0_2 - g0_1)(x, .)        on Gamma1
        R2 = (1/mu2)(Sdn2_ext h2 + Mc h3 + g0dn_2(x, .))
             - (1/mu1)(Sdn1_int h1 + g0dn_1(x, .))              on Gamma1
        R3 = S2c h2 + D2_int h3 + g0_2(x, .)                    on Gamma2
    """

    op: object
    scheme1: object
    scheme2: object | None

    @property
    def unbounded(self):
        return self.scheme2 is None

    # --- residual blocks: R = sum_k block[k] @ h_k + rhs(x) -------------------

    def jump1_blocks(self):
        op, s1 = self.op, self.scheme1
        b1 = -potentials.slp_matrix_self(op, s1, region=1)
        b2 = potentials.slp_matrix_self(op, s1, region=2)
        b3 = None
        if not self.unbounded:
            b3 = potentials.dlp_matrix(op, self.scheme2, s1.curve.nodes, region=2)
        return b1, b2, b3

    def jump1_rhs(self, x_batch):
        x = np.atleast_2d(x_batch)[:, None, :]
        y = self.scheme1.curve.nodes[None, :, :]
        return kernels.g0(self.op, x, y, region=2) - kernels.g0(self.op, x, y, region=1)

    def jump2_blocks(self):
        op, s1 = self.op, self.scheme1
        mu1, mu2 = op.interface.mu1, op.interface.mu2
        b1 = -potentials.slp_dn_boundary_limit_matrix(op, s1, "interior", region=1) / mu1
        b2 = potentials.slp_dn_boundary_limit_matrix(op, s1, "exterior", region=2) / mu2
        b3 = None
        if not self.unbounded:
            b3 = potentials.dlp_dn_matrix(
                op, self.scheme2, s1.curve.nodes, s1.curve.normals, region=2
            ) / mu2
        return b1, b2, b3

    def jump2_rhs(self, x_batch):
        op = self.op
        mu1, mu2 = op.interface.mu1, op.interface.mu2
        x = np.atleast_2d(x_batch)[:, None, :]
        y = self.scheme1.curve.nodes[None, :, :]
        n_y = self.scheme1.curve.normals[None, :, :]
        # derivative of G0(x, y) in its second argument
        d2 = kernels.g0_dn_z(op, x, y, n_y, region=2)
        d1 = kernels.g0_dn_z(op, x, y, n_y, region=1)
        return d2 / mu2 - d1 / mu1

    def bd_blocks(self):
        op, s1, s2 = self.op, self.scheme1, self.scheme2
        b2 = potentials.slp_matrix(op, s1, s2.curve.nodes, region=2)
        b3 = potentials.dlp_boundary_limit_matrix(op, s2, "interior", region=2)
        return None, b2, b3

    def bd_rhs(self, x_batch):
        x = np.atleast_2d(x_batch)[:, None, :]
        w = self.scheme2.curve.nodes[None, :, :]
        return kernels.g0(self.op, x, w, region=2)

    # --- evaluation of H from densities ---------------------------------------

    def eval_matrices(self, targets, region):
        """Matrices (M1, M2, M3) with H(targets) = sum_k M_k @ h_k for one region."""
        if region == 1:
            m1 = potentials.slp_matrix(self.op, self.scheme1, targets, region=1)
            return m1, None, None
        m2 = potentials.slp_matrix(self.op, self.scheme1, targets, region=2)
        m3 = None
        if not self.unbounded:
            m3 = potentials.dlp_matrix(self.op, self.scheme2, targets, region=2)
        return None, m2, m3


def make_interface_operators(op, domain):
    if op.interface is None:
        raise ValueError("interface representation needs interface parameters")
    scheme1 = potentials.make_scheme(domain.curves[0])
    scheme2 = potentials.make_scheme(domain.curves[1]) if len(domain.curves) == 2 else None
    return InterfaceOperators(op=op, scheme1=scheme1, scheme2=scheme2)
