//! JSON form `{"family", "dim", "params", "profile"?}` of a [`SolutionSpec`].

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::families::planar::{CaseIIParams, CustomProfileParams, ProfileField};
use crate::families::{
    custom_profile, make_case_iii, make_constant_director, make_landau, make_perturbed_hedgehog, CaseIParams,
    CaseIIIParams, ConstantDirectorParams, Family, FamilyTag, HedgehogParams, LandauParams, SolutionSpec,
};
use crate::periodic_ode::ProfileSolution;

/// The `profile` block.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileBlock {
    fourier_cos: Vec<f64>,
    fourier_sin: Vec<f64>,
    lambda: f64,
    #[serde(rename = "C1")]
    c1: f64,
    k: u32,
    #[serde(rename = "Phi")]
    phi: f64,
}

fn profile_block<P>(f: &ProfileField<P>) -> Value {
    let block = ProfileBlock {
        fourier_cos: f.profile.fourier_cos.clone(),
        fourier_sin: f.profile.fourier_sin.clone(),
        lambda: f.profile.lambda,
        c1: f.c1,
        k: f.profile.k,
        phi: f.profile.phi,
    };
    serde_json::to_value(block).expect("profile block serializes")
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("parameters serialize")
}

pub(crate) fn to_document(spec: &SolutionSpec) -> Value {
    let (params, profile) = match &spec.family {
        Family::CaseI(p) => (to_value(p), None),
        Family::CaseIi(f) => (to_value(&f.params), Some(profile_block(f))),
        Family::CaseIii(p) => (to_value(p), None),
        Family::Landau(l) => (to_value(&l.params), None),
        Family::Hedgehog(h) => (to_value(h), None),
        Family::ConstantDirector(d) => (
            to_value(&ConstantDirectorParams {
                d0: d[..spec.dim].to_vec(),
            }),
            None,
        ),
        Family::CustomProfile(f) => (to_value(&f.params), Some(profile_block(f))),
    };
    let mut doc = json!({
        "family": spec.family().as_str(),
        "dim": spec.dim,
        "params": params,
    });
    if let Some(p) = profile {
        doc["profile"] = p;
    }
    doc
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedSpec(msg.into())
}

fn parse<T: DeserializeOwned>(v: &Value, what: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| malformed(format!("{what}: {e}")))
}

fn require_dim(dim: usize, want: usize, family: FamilyTag) -> Result<()> {
    if dim == want {
        Ok(())
    } else {
        Err(malformed(format!("family {family} requires dim = {want}, got {dim}")))
    }
}

fn read_profile(doc: &Value) -> Result<(ProfileSolution, f64)> {
    let block: ProfileBlock = parse(
        doc.get("profile").ok_or_else(|| malformed("profile block is required for this family"))?,
        "profile",
    )?;
    if !block.c1.is_finite() {
        return Err(malformed("C1 must be finite"));
    }
    let profile = ProfileSolution::from_coefficients(block.fourier_cos, block.fourier_sin, block.lambda, block.phi, block.k)?;
    Ok((profile, block.c1))
}

pub(crate) fn from_document(doc: &Value) -> Result<SolutionSpec> {
    let obj = doc.as_object().ok_or_else(|| malformed("spec must be a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "family" | "dim" | "params" | "profile") {
            return Err(malformed(format!("unknown key '{key}'")));
        }
    }
    let family: FamilyTag = doc
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("missing string field 'family'"))?
        .parse()
        .map_err(|e: Error| malformed(e.to_string()))?;
    let dim = doc
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| malformed("missing integer field 'dim'"))? as usize;
    let params = doc.get("params").cloned().unwrap_or_else(|| json!({}));
    let has_profile = doc.get("profile").is_some();
    let wants_profile = matches!(family, FamilyTag::CaseIi | FamilyTag::CustomProfile);
    if has_profile && !wants_profile {
        return Err(malformed(format!("family {family} takes no profile block")));
    }
    let spec = match family {
        FamilyTag::CaseI => {
            require_dim(dim, 2, family)?;
            let p: CaseIParams = parse(&params, "case_i params")?;
            p.validate()?;
            SolutionSpec {
                dim,
                family: Family::CaseI(p),
            }
        }
        FamilyTag::CaseIi => {
            require_dim(dim, 2, family)?;
            let p: CaseIIParams = parse(&params, "case_ii params")?;
            p.validate()?;
            let (profile, c1) = read_profile(doc)?;
            if profile.k != p.k || (profile.phi - p.phi).abs() > 1e-12 * (1.0 + p.phi.abs()) {
                return Err(malformed("profile (Phi, k) disagrees with params"));
            }
            SolutionSpec {
                dim,
                family: Family::CaseIi(ProfileField::new(p, profile, c1)),
            }
        }
        FamilyTag::CaseIii => {
            require_dim(dim, 2, family)?;
            let p: CaseIIIParams = parse(&params, "case_iii params")?;
            make_case_iii(p.psi, p.mu, p.theta3)?
        }
        FamilyTag::Landau => {
            require_dim(dim, 3, family)?;
            let p: LandauParams = parse(&params, "landau params")?;
            make_landau(p.a)?
        }
        FamilyTag::Hedgehog => {
            let p: HedgehogParams = parse(&params, "hedgehog params")?;
            make_perturbed_hedgehog(dim, p.perturbation)?
        }
        FamilyTag::ConstantDirector => {
            let p: ConstantDirectorParams = parse(&params, "constant_director params")?;
            make_constant_director(dim, &p.d0)?
        }
        FamilyTag::CustomProfile => {
            require_dim(dim, 2, family)?;
            let p: CustomProfileParams = parse(&params, "custom_profile params")?;
            let (profile, c1) = read_profile(doc)?;
            custom_profile(profile, c1, p.m, p.theta1, p.theta2)?
        }
    };
    Ok(spec)
}
