//! Scenario files: TOML documents describing one preparator or one RAIO instance.
//!
//! ```toml
//! label = "sg-negative"
//! model = "sg"              # sg | hole | custom | raio-twin
//! variant = "negative"
//! alpha_re = 0.7071067811865476
//! beta_re = 0.7071067811865476
//!
//! [geometry]
//! n_sites = 64
//! split_index = 32
//! packet_width = 4.0
//! packet_centers = [48.0, 16.0]
//!
//! [unitaries]
//! object = "identity"       # identity | seeded-random:<seed> | inline operator
//!
//! [tolerances]
//! validation_eps = 1e-9
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use prepsim::preparators::hole_packet;
use prepsim::random::{haar_unitary, seeded_rng};
use prepsim::{
    build_decoupled_instance, build_hole, build_leaky_instance, build_sg, build_twin_instance,
    Complex64, DimensionSignature, GridGeometry64, HoleVariant, Occurrence, Operator64,
    OperatorKind, OperatorRecord, PreparatorKind, PreparatorSpec64, RaioInstance64, SgVariant,
    Tolerances64, Trigger,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Sg,
    Hole,
    Custom,
    RaioTwin,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sg => "sg",
            Self::Hole => "hole",
            Self::Custom => "custom",
            Self::RaioTwin => "raio-twin",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Raw file contents, before any validation beyond the TOML grammar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_im: Option<f64>,
    /// Seed of the detector unitary in the `detector-passthrough` SG variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_in: Option<PsiIn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occurrence: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_preparator: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_initial: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trigger: Option<TriggerEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<UnitariesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_composite: Option<OperatorRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiIn {
    /// `"packet"`: the default two-lobe packet over hole and screen.
    Named(String),
    Inline {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TriggerEntry {
    /// `"certain"`: no triggering event.
    Named(String),
    Inline(OperatorRecord),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitaryEntry {
    /// `"identity"` or `"seeded-random:<seed>"`.
    Named(String),
    Inline(OperatorRecord),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub packet_centers: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitariesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<UnitaryEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preparator: Option<UnitaryEntry>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certainty_eps: Option<f64>,
}

/// Which instance builder a `raio-twin` scenario uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwinVariant {
    Twin,
    Decoupled,
    Leaky,
}

impl TwinVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Twin => "twin",
            Self::Decoupled => "decoupled",
            Self::Leaky => "leaky",
        }
    }
}

/// Parameters of a generated RAIO instance; the seed can be swapped per trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TwinSetup {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub d_preparator: usize,
    pub region_size: usize,
    pub seed: u64,
    pub variant: TwinVariant,
}

impl TwinSetup {
    pub fn build(&self, seed: u64, tol: &Tolerances64) -> prepsim::Result<RaioInstance64> {
        let builder = match self.variant {
            TwinVariant::Twin => build_twin_instance,
            TwinVariant::Decoupled => build_decoupled_instance,
            TwinVariant::Leaky => build_leaky_instance,
        };
        builder(self.alpha, self.beta, self.d_preparator, self.region_size, seed, tol)
    }
}

/// Model-specific facts kept next to a preparator for the `run` checks.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelInfo {
    Sg {
        alpha: Complex64,
        beta: Complex64,
        geometry: GridGeometry64,
    },
    Hole {
        geometry: GridGeometry64,
    },
    Custom,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Setup {
    Preparator { spec: PreparatorSpec64, info: ModelInfo },
    Raio { twin: TwinSetup, instance: RaioInstance64 },
}

/// A fully validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub origin: String,
    pub file: ScenarioFile,
    pub tolerances: Tolerances64,
    pub setup: Setup,
}

impl Scenario {
    pub fn label(&self) -> String {
        match &self.setup {
            Setup::Preparator { spec, .. } => spec.label().to_string(),
            Setup::Raio { .. } => self.file.label.clone().unwrap_or_else(|| "raio-twin".into()),
        }
    }

    pub fn signature(&self) -> Vec<usize> {
        match &self.setup {
            Setup::Preparator { spec, .. } => spec.rho_composite().signature().dims().to_vec(),
            Setup::Raio { instance, .. } => instance.signature().dims().to_vec(),
        }
    }
}

/// Reads and validates a scenario file with default tolerance handling.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    load_scenario(path, &[])
}

/// Reads and validates a scenario file; `overrides` are applied after the
/// file's own `[tolerances]` section.
pub fn load_scenario(path: &Path, overrides: &[(String, f64)]) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: PathBuf::from(path),
        source,
    })?;
    parse_scenario_str(&text, &path.display().to_string(), overrides)
}

pub fn parse_scenario_str(text: &str, origin: &str, overrides: &[(String, f64)]) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| CliError::Parse {
        origin: origin.to_string(),
        line: e.span().map(|s| line_of_offset(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    let ctx = Ctx { text, origin };
    let tolerances = resolve_tolerances(&file, overrides, &ctx)?;
    let setup = build_setup(&file, &tolerances, &ctx)?;
    Ok(Scenario {
        origin: origin.to_string(),
        file,
        tolerances,
        setup,
    })
}

/// Serializes a preparator as a self-contained `custom` scenario with every
/// operator inline.
pub fn spec_to_scenario(spec: &PreparatorSpec64, tol: &Tolerances64) -> ScenarioFile {
    let trigger = match spec.trigger() {
        Trigger::Certain => TriggerEntry::Named("certain".into()),
        Trigger::Event(q) => TriggerEntry::Inline(q.into()),
    };
    let (t_initial, t_final) = spec.times();
    ScenarioFile {
        label: Some(spec.label().to_string()),
        model: Model::Custom,
        variant: None,
        alpha_re: None,
        alpha_im: None,
        beta_re: None,
        beta_im: None,
        detector_seed: None,
        psi_in: None,
        kind: Some(spec.kind().as_str().into()),
        occurrence: Some(spec.occurrence().as_str().into()),
        d_preparator: None,
        region_size: None,
        seed: None,
        t_initial: Some(t_initial),
        t_final: Some(t_final),
        trigger: Some(trigger),
        geometry: None,
        unitaries: Some(UnitariesSection {
            object: Some(UnitaryEntry::Inline(spec.u_object().into())),
            preparator: Some(UnitaryEntry::Inline(spec.u_preparator().into())),
        }),
        tolerances: Some(ToleranceSection {
            validation_eps: Some(tol.validation_eps),
            identity_eps: Some(tol.identity_eps),
            certainty_eps: Some(tol.certainty_eps),
        }),
        rho_composite: Some(spec.rho_composite().into()),
    }
}

impl ScenarioFile {
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Usage(format!("cannot serialize scenario: {e}")))
    }
}

struct Ctx<'a> {
    text: &'a str,
    origin: &'a str,
}

impl Ctx<'_> {
    fn field(&self, field: &str, message: impl fmt::Display) -> CliError {
        CliError::Field {
            origin: self.origin.to_string(),
            field: field.to_string(),
            line: locate_field(self.text, field),
            message: message.to_string(),
        }
    }

    fn missing(&self, field: &str, model: Model) -> CliError {
        self.field(field, format!("required for model `{model}`"))
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// 1-based line where `field` (`key` or `section.key`) is defined. Falls
/// back to the section header when the key itself is absent.
fn locate_field(text: &str, field: &str) -> Option<usize> {
    let (section, key) = match field.split_once('.') {
        Some((s, k)) => (Some(s), k),
        None => (None, field),
    };
    let mut current: Option<&str> = None;
    let mut header = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            let name = t.trim_matches(|c| c == '[' || c == ']').trim();
            if header.is_none() && (Some(name) == section || (section.is_none() && name == key)) {
                header = Some(i + 1);
            }
            current = Some(name);
            continue;
        }
        let defines = t
            .strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='));
        if defines && current == section {
            return Some(i + 1);
        }
    }
    header
}

fn resolve_tolerances(file: &ScenarioFile, overrides: &[(String, f64)], ctx: &Ctx) -> Result<Tolerances64> {
    let mut tol = Tolerances64::default();
    if let Some(section) = &file.tolerances {
        for (name, value) in [
            ("validation_eps", section.validation_eps),
            ("identity_eps", section.identity_eps),
            ("certainty_eps", section.certainty_eps),
        ] {
            if let Some(v) = value {
                tol = tol
                    .with(name, v)
                    .map_err(|e| ctx.field(&format!("tolerances.{name}"), e))?;
            }
        }
    }
    for (name, value) in overrides {
        tol = tol.with(name, *value).map_err(|e| CliError::Usage(format!("--tolerance {name}: {e}")))?;
    }
    Ok(tol)
}

fn build_setup(file: &ScenarioFile, tol: &Tolerances64, ctx: &Ctx) -> Result<Setup> {
    match file.model {
        Model::Sg => build_sg_setup(file, tol, ctx),
        Model::Hole => build_hole_setup(file, tol, ctx),
        Model::Custom => build_custom_setup(file, tol, ctx),
        Model::RaioTwin => build_twin_setup(file, tol, ctx),
    }
}

fn amplitudes(file: &ScenarioFile, ctx: &Ctx) -> Result<(Complex64, Complex64)> {
    if file.alpha_re.is_none() && file.alpha_im.is_none() {
        return Err(ctx.missing("alpha_re", file.model));
    }
    if file.beta_re.is_none() && file.beta_im.is_none() {
        return Err(ctx.missing("beta_re", file.model));
    }
    Ok((
        Complex64::new(file.alpha_re.unwrap_or(0.0), file.alpha_im.unwrap_or(0.0)),
        Complex64::new(file.beta_re.unwrap_or(0.0), file.beta_im.unwrap_or(0.0)),
    ))
}

fn check_normalization(alpha: Complex64, beta: Complex64, tol: &Tolerances64, ctx: &Ctx) -> Result<()> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - 1.0).abs() > tol.validation_eps {
        return Err(ctx.field("alpha_re", prepsim::Error::NotNormalized(norm)));
    }
    Ok(())
}

fn geometry(file: &ScenarioFile, ctx: &Ctx) -> Result<GridGeometry64> {
    let mut g = GridGeometry64::default();
    if let Some(s) = &file.geometry {
        if let Some(n) = s.n_sites {
            g.n_sites = n;
        }
        if let Some(k) = s.split_index {
            g.split_index = k;
        }
        if let Some(w) = s.packet_width {
            g.packet_width = w;
        }
        if let Some([up, low]) = s.packet_centers {
            g.packet_centers = (up, low);
        }
    }
    g.validate().map_err(|e| ctx.field("geometry", e))?;
    Ok(g)
}

fn times(spec: PreparatorSpec64, file: &ScenarioFile) -> PreparatorSpec64 {
    match (file.t_initial, file.t_final) {
        (None, None) => spec,
        (ti, tf) => spec.with_times(ti.unwrap_or(0.0), tf.unwrap_or(0.0)),
    }
}

fn with_label(spec: PreparatorSpec64, file: &ScenarioFile) -> PreparatorSpec64 {
    match &file.label {
        Some(label) => spec.with_label(label.clone()),
        None => spec,
    }
}

fn unitary(
    entry: Option<&UnitaryEntry>,
    sig: DimensionSignature,
    field: &str,
    tol: &Tolerances64,
    ctx: &Ctx,
) -> Result<Option<Operator64>> {
    let op = match entry {
        None => return Ok(None),
        Some(UnitaryEntry::Named(name)) if name == "identity" => Operator64::identity(sig)
            .ensure_kind(OperatorKind::Unitary, tol)
            .map_err(|e| ctx.field(field, e))?,
        Some(UnitaryEntry::Named(name)) => {
            let seed = name
                .strip_prefix("seeded-random:")
                .and_then(|s| s.trim().parse::<u64>().ok())
                .ok_or_else(|| {
                    ctx.field(
                        field,
                        format!("expected `identity`, `seeded-random:<seed>` or an inline operator, got `{name}`"),
                    )
                })?;
            haar_unitary(sig, &mut seeded_rng(seed))
        }
        Some(UnitaryEntry::Inline(rec)) => {
            let op = rec.to_operator(tol).map_err(|e| ctx.field(field, e))?;
            if op.signature() != &sig {
                return Err(ctx.field(
                    field,
                    format!("operator dims {} do not match factor dims {sig}", op.signature()),
                ));
            }
            op.ensure_kind(OperatorKind::Unitary, tol).map_err(|e| ctx.field(field, e))?
        }
    };
    Ok(Some(op))
}

/// Replaces the builder's default unitaries with the ones named in `[unitaries]`.
fn apply_unitaries(spec: PreparatorSpec64, file: &ScenarioFile, tol: &Tolerances64, ctx: &Ctx) -> Result<PreparatorSpec64> {
    let Some(section) = &file.unitaries else {
        return Ok(spec);
    };
    let u_i = unitary(section.object.as_ref(), spec.object_signature(), "unitaries.object", tol, ctx)?;
    let u_ii = unitary(
        section.preparator.as_ref(),
        spec.preparator_signature(),
        "unitaries.preparator",
        tol,
        ctx,
    )?;
    if u_i.is_none() && u_ii.is_none() {
        return Ok(spec);
    }
    let (t_i, t_f) = spec.times();
    let rebuilt = PreparatorSpec64::new(
        spec.rho_composite(),
        spec.trigger().clone(),
        u_i.as_ref().unwrap_or(spec.u_object()),
        u_ii.as_ref().unwrap_or(spec.u_preparator()),
        spec.kind(),
        spec.occurrence(),
        spec.label(),
        tol,
    )
    .map_err(|e| ctx.field("unitaries", e))?;
    Ok(rebuilt.with_times(t_i, t_f))
}

fn build_sg_setup(file: &ScenarioFile, tol: &Tolerances64, ctx: &Ctx) -> Result<Setup> {
    let (alpha, beta) = amplitudes(file, ctx)?;
    check_normalization(alpha, beta, tol, ctx)?;
    let geom = geometry(file, ctx)?;
    let variant = match file.variant.as_deref() {
        Some("measurement") => SgVariant::Measurement,
        Some("detector-passthrough") => SgVariant::DetectorPassthrough {
            seed: file.detector_seed.unwrap_or(0),
        },
        Some("negative") => SgVariant::Negative,
        Some("geometrical") => SgVariant::Geometrical,
        Some(other) => {
            return Err(ctx.field(
                "variant",
                format!("unknown sg variant `{other}` (measurement, detector-passthrough, negative, geometrical)"),
            ))
        }
        None => return Err(ctx.missing("variant", file.model)),
    };
    let spec = build_sg(alpha, beta, &geom, variant, tol).map_err(|e| ctx.field("variant", e))?;
    let spec = apply_unitaries(times(with_label(spec, file), file), file, tol, ctx)?;
    Ok(Setup::Preparator {
        spec,
        info: ModelInfo::Sg {
            alpha,
            beta,
            geometry: geom,
        },
    })
}

fn build_hole_setup(file: &ScenarioFile, tol: &Tolerances64, ctx: &Ctx) -> Result<Setup> {
    let geom = geometry(file, ctx)?;
    let variant = match file.variant.as_deref() {
        Some("negative") => HoleVariant::Negative,
        Some("geometrical") => HoleVariant::Geometrical,
        Some(other) => {
            return Err(ctx.field("variant", format!("unknown hole variant `{other}` (negative, geometrical)")))
        }
        None => return Err(ctx.missing("variant", file.model)),
    };
    let psi = match &file.psi_in {
        None => return Err(ctx.missing("psi_in", file.model)),
        Some(PsiIn::Named(name)) if name == "packet" => hole_packet(&geom).map_err(|e| ctx.field("psi_in", e))?,
        Some(PsiIn::Named(name)) => {
            return Err(ctx.field("psi_in", format!("expected `packet` or {{ re, im }}, got `{name}`")))
        }
        Some(PsiIn::Inline { re, im }) => {
            if !im.is_empty() && im.len() != re.len() {
                return Err(ctx.field("psi_in", format!("`re` has {} entries, `im` has {}", re.len(), im.len())));
            }
            DVector::from_fn(re.len(), |i, _| Complex64::new(re[i], im.get(i).copied().unwrap_or(0.0)))
        }
    };
    let spec = build_hole(&psi, &geom, variant, tol).map_err(|e| ctx.field("psi_in", e))?;
    let spec = apply_unitaries(times(with_label(spec, file), file), file, tol, ctx)?;
    Ok(Setup::Preparator {
        spec,
        info: ModelInfo::Hole { geometry: geom },
    })
}

fn build_custom_setup(file: &ScenarioFile, tol: &Tolerances64, ctx: &Ctx) -> Result<Setup> {
    let rec = file
        .rho_composite
        .as_ref()
        .ok_or_else(|| ctx.missing("rho_composite", file.model))?;
    let rho = rec
        .to_operator(tol)
        .and_then(|op| op.ensure_kind(OperatorKind::Density, tol))
        .map_err(|e| ctx.field("rho_composite", e))?;
    if rho.signature().len() != 2 {
        return Err(ctx.field(
            "rho_composite",
            format!("dims must name two factors [object, preparator], got {}", rho.signature()),
        ));
    }
    let dims = rho.signature().dims().to_vec();
    let trigger = match &file.trigger {
        None => return Err(ctx.missing("trigger", file.model)),
        Some(TriggerEntry::Named(name)) if name == "certain" => Trigger::Certain,
        Some(TriggerEntry::Named(name)) => {
            return Err(ctx.field("trigger", format!("expected `certain` or an inline operator, got `{name}`")))
        }
        Some(TriggerEntry::Inline(rec)) => Trigger::Event(rec.to_operator(tol).map_err(|e| ctx.field("trigger", e))?),
    };
    let kind: PreparatorKind = file
        .kind
        .as_deref()
        .ok_or_else(|| ctx.missing("kind", file.model))?
        .parse()
        .map_err(|e| ctx.field("kind", e))?;
    let occurrence: Occurrence = file
        .occurrence
        .as_deref()
        .ok_or_else(|| ctx.missing("occurrence", file.model))?
        .parse()
        .map_err(|e| ctx.field("occurrence", e))?;
    let section = file.unitaries.clone().unwrap_or_default();
    let sig = |d: usize| DimensionSignature::single(d).expect("validated positive");
    let u_i = unitary(section.object.as_ref(), sig(dims[0]), "unitaries.object", tol, ctx)?;
    let u_ii = unitary(section.preparator.as_ref(), sig(dims[1]), "unitaries.preparator", tol, ctx)?;
    let identity = |d: usize| Operator64::identity(sig(d)).ensure_kind(OperatorKind::Unitary, tol);
    let u_i = match u_i {
        Some(u) => u,
        None => identity(dims[0])?,
    };
    let u_ii = match u_ii {
        Some(u) => u,
        None => identity(dims[1])?,
    };
    let label = file.label.clone().unwrap_or_else(|| "custom".into());
    let spec = PreparatorSpec64::new(&rho, trigger, &u_i, &u_ii, kind, occurrence, label, tol).map_err(|e| {
        let field = match e {
            prepsim::Error::ImpossibleEvent(_) => "trigger",
            prepsim::Error::InvalidSpec(ref m) if m.contains("occurrence") => "occurrence",
            _ => "rho_composite",
        };
        ctx.field(field, e)
    })?;
    Ok(Setup::Preparator {
        spec: times(spec, file),
        info: ModelInfo::Custom,
    })
}

fn build_twin_setup(file: &ScenarioFile, tol: &Tolerances64, ctx: &Ctx) -> Result<Setup> {
    let (alpha, beta) = amplitudes(file, ctx)?;
    check_normalization(alpha, beta, tol, ctx)?;
    let d_preparator = file.d_preparator.ok_or_else(|| ctx.missing("d_preparator", file.model))?;
    let region_size = file.region_size.unwrap_or(d_preparator / 2);
    let variant = match file.variant.as_deref() {
        None | Some("twin") => TwinVariant::Twin,
        Some("decoupled") => TwinVariant::Decoupled,
        Some("leaky") => TwinVariant::Leaky,
        Some(other) => {
            return Err(ctx.field("variant", format!("unknown raio-twin variant `{other}` (twin, decoupled, leaky)")))
        }
    };
    let twin = TwinSetup {
        alpha,
        beta,
        d_preparator,
        region_size,
        seed: file.seed.unwrap_or(0),
        variant,
    };
    let instance = twin.build(twin.seed, tol).map_err(|e| ctx.field("region_size", e))?;
    Ok(Setup::Raio { twin, instance })
}
