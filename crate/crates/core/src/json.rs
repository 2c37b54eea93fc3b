//! JSON documents for spaces, polynomials, states and bundle elements.
//! Scalars are written as strings (`p/q` for rationals, scientific notation
//! for floats) so exact values survive a round trip.

use serde::{Deserialize, Serialize};

use crate::ccr::QuasiFreeState;
use crate::error::{AlgebraError, Result};
use crate::fedosov::BundleElement;
use crate::poly::{Monomial, Polynomial};
use crate::presymplectic::{AnySpace, PreSympSpace, ScalarMode, DEFAULT_TOLERANCE};
use crate::scalar::{Coeff, Real, Q};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub dim: usize,
    pub labels: Vec<String>,
    /// Row-major entries.
    pub form: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
    /// `exact` (default) or `floating`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub monomial: Vec<usize>,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub means: Vec<String>,
    pub covariance: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleTerm {
    pub a_mono: Vec<usize>,
    pub b_mono: Vec<usize>,
    pub form: Vec<usize>,
    pub re: String,
    pub im: String,
}

fn doc_err(e: impl std::fmt::Display) -> AlgebraError {
    AlgebraError::Document(e.to_string())
}

fn parse<R: Real>(s: &str) -> Result<R> {
    R::parse_text(s).ok_or_else(|| AlgebraError::Document(format!("bad scalar `{s}`")))
}

pub fn space_doc<R: Real>(space: &PreSympSpace<R>, point: Option<&[R]>) -> SpaceDoc {
    let (mode, tolerance) = match space.mode() {
        ScalarMode::Exact => (None, None),
        ScalarMode::Floating { tolerance } => (Some("floating".to_string()), Some(tolerance)),
    };
    SpaceDoc {
        dim: space.dim(),
        labels: space.labels().to_vec(),
        form: space.form().iter().flatten().map(Real::to_text).collect(),
        point: point.map(|p| p.iter().map(Real::to_text).collect()),
        mode,
        tolerance,
    }
}

pub fn space_to_json<R: Real>(space: &PreSympSpace<R>, point: Option<&[R]>) -> String {
    serde_json::to_string_pretty(&space_doc(space, point)).expect("serializable")
}

/// Parse a space in a known scalar mode.
pub fn space_from_doc<R: Real>(doc: &SpaceDoc) -> Result<(PreSympSpace<R>, Option<Vec<R>>)> {
    let n = doc.dim;
    if doc.labels.len() != n {
        return Err(AlgebraError::DimensionMismatch { expected: n, found: doc.labels.len() });
    }
    if doc.form.len() != n * n {
        return Err(AlgebraError::DimensionMismatch { expected: n * n, found: doc.form.len() });
    }
    let flat: Vec<R> = doc.form.iter().map(|s| parse(s)).collect::<Result<_>>()?;
    let form = flat.chunks(n.max(1)).take(n).map(|r| r.to_vec()).collect();
    let mode = match doc.mode.as_deref() {
        None | Some("exact") => ScalarMode::Exact,
        Some("floating") => ScalarMode::Floating { tolerance: doc.tolerance.unwrap_or(DEFAULT_TOLERANCE) },
        Some(other) => return Err(AlgebraError::Document(format!("unknown scalar mode `{other}`"))),
    };
    let space = PreSympSpace::new(doc.labels.clone(), form, mode)?;
    let point = match &doc.point {
        Some(p) => Some(p.iter().map(|s| parse(s)).collect::<Result<Vec<R>>>()?),
        None => None,
    };
    Ok((space, point))
}

pub fn space_from_json<R: Real>(s: &str) -> Result<(PreSympSpace<R>, Option<Vec<R>>)> {
    let doc: SpaceDoc = serde_json::from_str(s).map_err(doc_err)?;
    space_from_doc(&doc)
}

/// Parse a space whose mode is read from the document.
pub fn any_space_from_json(s: &str) -> Result<AnySpace> {
    let doc: SpaceDoc = serde_json::from_str(s).map_err(doc_err)?;
    match doc.mode.as_deref() {
        Some("floating") => Ok(AnySpace::Floating(space_from_doc::<f64>(&doc)?.0)),
        _ => Ok(AnySpace::Exact(space_from_doc::<Q>(&doc)?.0)),
    }
}

pub fn poly_to_json<C: Coeff>(p: &Polynomial<C>) -> String {
    let terms: Vec<PolyTerm> = p
        .terms()
        .iter()
        .map(|(m, c)| PolyTerm { monomial: m.indices().to_vec(), re: c.re().to_text(), im: c.im().to_text() })
        .collect();
    serde_json::to_string(&terms).expect("serializable")
}

pub fn poly_from_json<C: Coeff>(s: &str, nvars: usize) -> Result<Polynomial<C>> {
    let terms: Vec<PolyTerm> = serde_json::from_str(s).map_err(doc_err)?;
    let mut p = Polynomial::zero(nvars);
    for t in terms {
        if let Some(&bad) = t.monomial.iter().find(|&&i| i >= nvars) {
            return Err(AlgebraError::SpaceMismatch { expected: nvars, found: bad + 1 });
        }
        let c = C::from_parts(parse(&t.re)?, parse(&t.im)?)
            .ok_or_else(|| AlgebraError::Document("imaginary part on a real polynomial".into()))?;
        p.add_term(Monomial::new(t.monomial), c);
    }
    Ok(p)
}

pub fn state_to_json<R: Real>(state: &QuasiFreeState<R>) -> String {
    let doc = StateDoc {
        means: state.mean.iter().map(Real::to_text).collect(),
        covariance: state.covariance.iter().flatten().map(Real::to_text).collect(),
    };
    serde_json::to_string(&doc).expect("serializable")
}

/// Raw mean and covariance; validation happens in `QuasiFreeState::new`.
pub fn state_parts_from_json<R: Real>(s: &str) -> Result<(Vec<R>, Vec<Vec<R>>)> {
    let doc: StateDoc = serde_json::from_str(s).map_err(doc_err)?;
    let n = doc.means.len();
    if doc.covariance.len() != n * n {
        return Err(AlgebraError::DimensionMismatch { expected: n * n, found: doc.covariance.len() });
    }
    let mean = doc.means.iter().map(|x| parse(x)).collect::<Result<Vec<R>>>()?;
    let flat = doc.covariance.iter().map(|x| parse(x)).collect::<Result<Vec<R>>>()?;
    let cov = flat.chunks(n.max(1)).take(n).map(|r| r.to_vec()).collect();
    Ok((mean, cov))
}

pub fn bundle_to_json<C: Coeff>(w: &BundleElement<C>) -> String {
    let terms: Vec<BundleTerm> = w
        .terms()
        .iter()
        .map(|(k, c)| BundleTerm {
            a_mono: k.a.indices().to_vec(),
            b_mono: k.b.indices().to_vec(),
            form: k.form.clone(),
            re: c.re().to_text(),
            im: c.im().to_text(),
        })
        .collect();
    serde_json::to_string(&terms).expect("serializable")
}

pub fn bundle_from_json<C: Coeff>(s: &str, dim: usize, lin_dim: usize) -> Result<BundleElement<C>> {
    let terms: Vec<BundleTerm> = serde_json::from_str(s).map_err(doc_err)?;
    let mut w = BundleElement::zero(dim, lin_dim);
    for t in terms {
        let c = C::from_parts(parse(&t.re)?, parse(&t.im)?)
            .ok_or_else(|| AlgebraError::Document("imaginary part on a real element".into()))?;
        w.push(Monomial::new(t.a_mono), Monomial::new(t.b_mono), &t.form, c)?;
    }
    Ok(w)
}
