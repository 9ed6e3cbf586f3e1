use crate::error::Result;
use crate::flow::{gauge_velocity, FlowState};
use crate::geometry::{arclength, d_ds, psi_derivatives, unit_sphere_volume, Profile};

/// `a/b`, with `0` where `b` vanishes (the origin, always masked).
fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

fn zip_map(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

/// Every field the residual identities need at one state, all derived from
/// plain second-order `d/ds = φ⁻¹ d/dx` stencils so that refinement
/// behaviour is uniform across equations.
#[derive(Debug, Clone)]
pub struct Fields {
    pub profile: Profile,
    pub t: f64,
    pub n: usize,
    pub s: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_s: Vec<f64>,
    pub psi_ss: Vec<f64>,
    pub psi_sss: Vec<f64>,
    pub psi_ssss: Vec<f64>,
    pub k0: Vec<f64>,
    pub k1: Vec<f64>,
    pub k0_s: Vec<f64>,
    pub k1_s: Vec<f64>,
    /// `K = ψ_ss/ψ = -K₀`.
    pub kk: Vec<f64>,
    pub kk_s: Vec<f64>,
    pub kk_ss: Vec<f64>,
    /// `H = n ψ_s/ψ`; zero placeholder at the origin.
    pub h: Vec<f64>,
    pub h_s: Vec<f64>,
    pub h_ss: Vec<f64>,
    pub v: Vec<f64>,
    pub v_s: Vec<f64>,
    pub v_ss: Vec<f64>,
    pub a: Vec<f64>,
    pub a_s: Vec<f64>,
    pub a_ss: Vec<f64>,
    /// `u = ψ^k` for the configured power.
    pub u: Vec<f64>,
    pub u_s: Vec<f64>,
    pub u_ss: Vec<f64>,
    /// `n ∫₀^s ψ_ss/ψ ds` by trapezoid.
    pub arclength_rate: Vec<f64>,
    /// Gauge velocity of the stepping grid.
    pub g: Vec<f64>,
    /// `ψ_s`, `ψ_ss` from first-order one-sided differences, for negative controls.
    pub psi_s_first_order: Vec<f64>,
    pub psi_ss_first_order: Vec<f64>,
}

impl Fields {
    pub fn new(state: &FlowState, power: i32) -> Result<Self> {
        let p = &state.profile;
        let n = p.n();
        let nf = n as f64;
        let d = |f: &[f64]| d_ds(f, p);
        let psi = p.psi().to_vec();
        let psi_s = d(&psi)?;
        let psi_ss = d(&psi_s)?;
        let psi_sss = d(&psi_ss)?;
        let psi_ssss = d(&psi_sss)?;
        let k0 = zip_map(&psi_ss, &psi, |a, b| -ratio(a, b));
        let k1 = zip_map(&psi_s, &psi, |a, b| ratio(1.0 - a * a, b * b));
        let kk: Vec<f64> = k0.iter().map(|k| -k).collect();
        let h = zip_map(&psi_s, &psi, |a, b| nf * ratio(a, b));
        let vn = unit_sphere_volume(n);
        let v: Vec<f64> = psi.iter().map(|x| vn * x.powi(n as i32)).collect();
        let a: Vec<f64> = (0..psi.len()).map(|i| psi[i] * psi[i] * (k1[i] - k0[i])).collect();
        let u: Vec<f64> = psi.iter().map(|x| x.powi(power)).collect();

        let s = arclength(p);
        // parity-aware stencils keep the integrand accurate next to the origin
        let pd = psi_derivatives(p);
        let integrand: Vec<f64> = (0..psi.len())
            .map(|i| if i == 0 { pd.origin_ratio } else { pd.psi_ss[i] / psi[i] })
            .collect();
        let mut arclength_rate = vec![0.0; psi.len()];
        for i in 1..psi.len() {
            arclength_rate[i] =
                arclength_rate[i - 1] + 0.5 * nf * (integrand[i - 1] + integrand[i]) * (s[i] - s[i - 1]);
        }

        let x_first = |f: &[f64]| -> Vec<f64> { zip_map(&p.grid().dx_first_order(f), p.phi(), |a, b| a / b) };
        let psi_s_first_order = x_first(&psi);
        let psi_ss_first_order = x_first(&psi_s_first_order);

        let (k0_s, k1_s) = (d(&k0)?, d(&k1)?);
        let (kk_s, h_s, v_s, a_s, u_s) = (d(&kk)?, d(&h)?, d(&v)?, d(&a)?, d(&u)?);
        Ok(Fields {
            profile: p.clone(),
            t: state.t,
            n,
            kk_ss: d(&kk_s)?,
            h_ss: d(&h_s)?,
            v_ss: d(&v_s)?,
            a_ss: d(&a_s)?,
            u_ss: d(&u_s)?,
            g: gauge_velocity(p)?.g,
            s,
            psi,
            psi_s,
            psi_ss,
            psi_sss,
            psi_ssss,
            k0,
            k1,
            k0_s,
            k1_s,
            kk,
            kk_s,
            h,
            h_s,
            v,
            v_s,
            a,
            a_s,
            u,
            u_s,
            arclength_rate,
            psi_s_first_order,
            psi_ss_first_order,
        })
    }

    /// `d/ds` of an arbitrary nodal field at this state.
    pub fn ds(&self, f: &[f64]) -> Vec<f64> {
        d_ds(f, &self.profile).expect("field sampled on this state's grid")
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }
}

/// Three consecutive recorded states, for centred time differences.
#[derive(Debug, Clone)]
pub struct Window {
    pub prev: Fields,
    pub cur: Fields,
    pub next: Fields,
}

impl Window {
    /// `∂_t f` of the bare flow at fixed bare coordinate: the centred
    /// difference at fixed grid node (second order on uneven steps) minus the
    /// transport `G f_s` of the stepping gauge.
    pub fn dt<'a>(&'a self, f: impl Fn(&'a Fields) -> &'a [f64], f_s: impl Fn(&'a Fields) -> &'a [f64]) -> Vec<f64> {
        let hm = self.cur.t - self.prev.t;
        let hp = self.next.t - self.cur.t;
        let wm = -hp / (hm * (hm + hp));
        let w0 = (hp - hm) / (hm * hp);
        let wp = hm / (hp * (hm + hp));
        let (a, b, c) = (f(&self.prev), f(&self.cur), f(&self.next));
        let fs = f_s(&self.cur);
        (0..b.len())
            .map(|i| wm * a[i] + w0 * b[i] + wp * c[i] - self.cur.g[i] * fs[i])
            .collect()
    }

    /// Bare `∂_t s`; the grid velocity enters with `s_s = 1`.
    pub fn dt_arclength(&self) -> Vec<f64> {
        let ones = vec![1.0; self.cur.len()];
        self.dt(|f| &f.s, |_| &ones)
    }
}
