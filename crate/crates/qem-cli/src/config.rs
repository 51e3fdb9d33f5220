//! Scenario configuration: JSON schema with an explicit units block,
//! converted to strict SI at parse time.

use serde::{Deserialize, Serialize};

use qem::layered::LayeredStack;
use qem::mesh::{
    default_gate_layout, generate_box_with_cap, generate_gate_layout, generate_patch_array,
    load_mesh, GateBox, Material, MeshFormat, TetMesh, ThicknessClass,
};
use qem::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("config io: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse: {0}")]
    Json(#[from] serde_json::Error),
    #[error("mesh: {0}")]
    Mesh(#[from] qem::mesh::MeshError),
    #[error("layered: {0}")]
    Layered(#[from] qem::layered::LayeredError),
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    M,
    Um,
    Nm,
}

impl LengthUnit {
    pub fn to_meters(self, v: f64) -> f64 {
        match self {
            LengthUnit::M => v,
            LengthUnit::Um => v * 1e-6,
            LengthUnit::Nm => v * 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyUnit {
    Hz,
    Mhz,
    Ghz,
}

impl FrequencyUnit {
    /// Convert a config frequency to angular frequency, rad/s.
    pub fn to_rad_per_s(self, v: f64) -> f64 {
        let hz = match self {
            FrequencyUnit::Hz => v,
            FrequencyUnit::Mhz => v * 1e6,
            FrequencyUnit::Ghz => v * 1e9,
        };
        2.0 * std::f64::consts::PI * hz
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    S,
    Us,
    Ns,
}

impl TimeUnit {
    pub fn to_seconds(self, v: f64) -> f64 {
        match self {
            TimeUnit::S => v,
            TimeUnit::Us => v * 1e-6,
            TimeUnit::Ns => v * 1e-9,
        }
    }
}

fn default_time_unit() -> TimeUnit {
    TimeUnit::S
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub length: LengthUnit,
    pub frequency: FrequencyUnit,
    #[serde(default = "default_time_unit")]
    pub time: TimeUnit,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct MaterialConfig {
    pub name: Option<String>,
    pub conductivity: f64,
    #[serde(default = "one")]
    pub relative_permittivity: f64,
}

fn one() -> f64 {
    1.0
}

impl MaterialConfig {
    pub fn build(&self) -> Result<Material, ConfigError> {
        Ok(Material::new(
            self.name.clone().unwrap_or_else(|| "material".into()),
            self.conductivity,
            self.relative_permittivity,
        )?)
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase", tag = "kind")]
pub enum GeometryConfig {
    /// Planar film; lengths in config units.
    #[serde(rename_all = "camelCase")]
    Layered { thickness: f64, material: MaterialConfig },
    #[serde(rename_all = "camelCase")]
    Box { dims: [f64; 3], h: f64, material: MaterialConfig },
    #[serde(rename_all = "camelCase")]
    PatchArray {
        side: f64,
        gap: f64,
        thickness: f64,
        count: usize,
        h: f64,
        material: MaterialConfig,
    },
    #[serde(rename_all = "camelCase")]
    GateLayout {
        /// Built-in approximate three-qubit gate layout when true.
        #[serde(default)]
        default_layout: bool,
        #[serde(default)]
        boxes: Vec<GateBoxConfig>,
        h: f64,
        material: MaterialConfig,
    },
    #[serde(rename_all = "camelCase")]
    MeshFile {
        path: String,
        format: MeshFormatConfig,
        /// Region id -> material.
        materials: std::collections::BTreeMap<u32, MaterialConfig>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshFormatConfig {
    QemAscii,
    Msh22,
}

impl From<MeshFormatConfig> for MeshFormat {
    fn from(v: MeshFormatConfig) -> Self {
        match v {
            MeshFormatConfig::QemAscii => MeshFormat::QemAscii,
            MeshFormatConfig::Msh22 => MeshFormat::Msh22,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct GateBoxConfig {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub class: GateClassConfig,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GateClassConfig {
    Thin,
    Thick,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct QubitConfig {
    /// Quantization axes to sweep: "x", "y", "z".
    #[serde(default = "default_axes")]
    pub axes: Vec<String>,
    /// Splitting frequency in config frequency units; defaults to the scan
    /// frequency.
    #[serde(default)]
    pub frequency: Option<f64>,
    #[serde(default = "one")]
    pub transverse_moment_bohr: f64,
    #[serde(default = "one")]
    pub longitudinal_moment_bohr: f64,
}

fn default_axes() -> Vec<String> {
    vec!["x".into(), "y".into(), "z".into()]
}

impl Default for QubitConfig {
    fn default() -> Self {
        Self {
            axes: default_axes(),
            frequency: None,
            transverse_moment_bohr: 1.0,
            longitudinal_moment_bohr: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct BathConfig {
    #[serde(default)]
    pub temperature_k: f64,
    /// Dephasing cutoff in config frequency units (default 10 MHz).
    #[serde(default)]
    pub dephasing_cutoff: Option<f64>,
}

impl Default for BathConfig {
    fn default() -> Self {
        Self { temperature_k: 0.0, dephasing_cutoff: None }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub enum ScanVariable {
    /// Qubit height z above the structure's top plane.
    Height,
    /// Two-qubit separation along x at fixed height.
    Separation,
    /// Single-qubit x position at fixed height (relaxometry line scan).
    LineX,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ScanConfig {
    pub variable: ScanVariable,
    /// [start, end] in config length units; must be ascending and positive
    /// for height/separation scans.
    pub range: [f64; 2],
    pub count: usize,
    /// Fixed height for separation and line scans (config length units).
    #[serde(default)]
    pub height: Option<f64>,
    /// In-plane base point, config length units (default origin).
    #[serde(default)]
    pub base: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub enum OutputKind {
    Relaxation,
    CorrelationRatio,
    T1,
    Dephasing,
    Fidelity,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Vie,
    Layered,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct DephasingConfig {
    #[serde(default = "default_ppd")]
    pub points_per_decade: usize,
    #[serde(default = "default_decades")]
    pub decades: usize,
    /// Evaluation time for the dephasing-rate output, config time units.
    pub time: f64,
}

fn default_ppd() -> usize {
    5
}

fn default_decades() -> usize {
    4
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct FidelityConfig {
    /// Idle-gate duration, config time units.
    pub duration: f64,
    /// RK4 steps across the gate (default 2000).
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Include the dephasing channel (requires `dephasing` config).
    #[serde(default)]
    pub include_dephasing: bool,
}

fn default_steps() -> usize {
    2000
}

fn default_budget() -> usize {
    20_000
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ScenarioConfig {
    pub units: Units,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub qubits: QubitConfig,
    #[serde(default)]
    pub bath: BathConfig,
    pub scan: ScanConfig,
    /// Drive frequency in config frequency units.
    pub frequency: f64,
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub backends: Option<Vec<BackendKind>>,
    #[serde(default = "default_budget")]
    pub mesh_budget: usize,
    #[serde(default)]
    pub dephasing: Option<DephasingConfig>,
    #[serde(default)]
    pub fidelity: Option<FidelityConfig>,
}

/// Fully converted SI scenario ready to run.
pub struct Scenario {
    pub config_echo: serde_json::Value,
    pub backends: Vec<(BackendKind, qem::greens::Scene)>,
    pub mesh_stats: Option<(usize, usize)>, // (tets, nodes)
    pub qubit_omega: f64,
    pub axes: Vec<(String, Vec3)>,
    pub transverse_moment: f64,
    pub longitudinal_moment: f64,
    pub bath: qem::bath::BathSpec,
    pub scan: ScanPoints,
    pub outputs: Vec<OutputKind>,
    pub dephasing: Option<DephasingSettings>,
    pub fidelity: Option<FidelitySettings>,
}

pub struct DephasingSettings {
    pub points_per_decade: usize,
    pub decades: usize,
    pub time: f64,
}

pub struct FidelitySettings {
    pub duration: f64,
    pub steps: usize,
    pub include_dephasing: bool,
}

/// Scan expanded to SI points.
pub struct ScanPoints {
    pub variable: ScanVariable,
    /// Scan coordinate values (meters).
    pub values: Vec<f64>,
    /// Qubit positions per scan point (primary qubit).
    pub primary: Vec<Vec3>,
    /// Second qubit per scan point (separation scans only).
    pub secondary: Option<Vec<Vec3>>,
}

fn axis_vector(name: &str) -> Result<Vec3, ConfigError> {
    match name {
        "x" => Ok(Vec3::new(1.0, 0.0, 0.0)),
        "y" => Ok(Vec3::new(0.0, 1.0, 0.0)),
        "z" => Ok(Vec3::new(0.0, 0.0, 1.0)),
        other => Err(ConfigError::Invalid(format!(
            "qubits.axes: unknown axis `{other}` (want x, y, or z)"
        ))),
    }
}

impl ScenarioConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn build(&self) -> Result<Scenario, ConfigError> {
        let lu = self.units.length;
        let fu = self.units.frequency;
        let tu = self.units.time;
        let omega = fu.to_rad_per_s(self.frequency);
        if omega <= 0.0 {
            return Err(ConfigError::Invalid("frequency must be positive".into()));
        }
        let qubit_omega = self.qubits.frequency.map(|f| fu.to_rad_per_s(f)).unwrap_or(omega);

        // geometry -> scenes
        let mut mesh_stats = None;
        let build_mesh = |mesh: TetMesh| -> qem::greens::Scene { qem::greens::Scene::vie(mesh) };
        let (vie_scene, layered_scene): (Option<qem::greens::Scene>, Option<qem::greens::Scene>) =
            match &self.geometry {
                GeometryConfig::Layered { thickness, material } => {
                    let stack = LayeredStack::new(lu.to_meters(*thickness), material.build()?)?;
                    (None, Some(qem::greens::Scene::layered(stack)))
                }
                GeometryConfig::Box { dims, h, material } => {
                    let (lx, ly, lz) =
                        (lu.to_meters(dims[0]), lu.to_meters(dims[1]), lu.to_meters(dims[2]));
                    // tops-at-zero, centered in x-y, matching the other
                    // generators so scan heights are distances to the metal
                    let mesh = generate_box_with_cap(
                        (lx, ly, lz),
                        lu.to_meters(*h),
                        material.build()?,
                        self.mesh_budget,
                    )?
                    .translated(qem::Vec3::new(-lx / 2.0, -ly / 2.0, -lz));
                    // companion layered stack of the same thickness for
                    // dual-backend comparisons
                    let stack = LayeredStack::new(lu.to_meters(dims[2]), material.build()?)?;
                    mesh_stats = Some((mesh.tet_count(), mesh.node_count()));
                    (Some(build_mesh(mesh)), Some(qem::greens::Scene::layered(stack)))
                }
                GeometryConfig::PatchArray { side, gap, thickness, count, h, material } => {
                    let mesh = generate_patch_array(
                        lu.to_meters(*side),
                        lu.to_meters(*gap),
                        lu.to_meters(*thickness),
                        *count,
                        lu.to_meters(*h),
                        material.build()?,
                    )?;
                    if mesh.tet_count() > self.mesh_budget {
                        return Err(ConfigError::Invalid(format!(
                            "patch array needs {} tets, above meshBudget {}",
                            mesh.tet_count(),
                            self.mesh_budget
                        )));
                    }
                    let stack =
                        LayeredStack::new(lu.to_meters(*thickness), material.build()?)?;
                    mesh_stats = Some((mesh.tet_count(), mesh.node_count()));
                    (Some(build_mesh(mesh)), Some(qem::greens::Scene::layered(stack)))
                }
                GeometryConfig::GateLayout { default_layout, boxes, h, material } => {
                    let gate_boxes: Vec<GateBox> = if *default_layout {
                        if !boxes.is_empty() {
                            return Err(ConfigError::Invalid(
                                "gateLayout: give either defaultLayout or boxes, not both".into(),
                            ));
                        }
                        default_gate_layout()
                    } else {
                        boxes
                            .iter()
                            .map(|b| GateBox {
                                x0: lu.to_meters(b.x0),
                                x1: lu.to_meters(b.x1),
                                y0: lu.to_meters(b.y0),
                                y1: lu.to_meters(b.y1),
                                class: match b.class {
                                    GateClassConfig::Thin => ThicknessClass::Thin,
                                    GateClassConfig::Thick => ThicknessClass::Thick,
                                },
                            })
                            .collect()
                    };
                    let mesh =
                        generate_gate_layout(&gate_boxes, lu.to_meters(*h), material.build()?)?;
                    if mesh.tet_count() > self.mesh_budget {
                        return Err(ConfigError::Invalid(format!(
                            "gate layout needs {} tets, above meshBudget {}",
                            mesh.tet_count(),
                            self.mesh_budget
                        )));
                    }
                    // thin-film companion: approximate by the thick class
                    let stack = LayeredStack::new(125.0e-9, material.build()?)?;
                    mesh_stats = Some((mesh.tet_count(), mesh.node_count()));
                    (Some(build_mesh(mesh)), Some(qem::greens::Scene::layered(stack)))
                }
                GeometryConfig::MeshFile { path, format, materials } => {
                    let mesh = load_mesh(path, (*format).into())?;
                    let mut table = std::collections::BTreeMap::new();
                    for (region, mat) in materials {
                        table.insert(*region, mat.build()?);
                    }
                    let mesh = mesh.with_materials(table)?;
                    if mesh.tet_count() > self.mesh_budget {
                        return Err(ConfigError::Invalid(format!(
                            "mesh has {} tets, above meshBudget {}",
                            mesh.tet_count(),
                            self.mesh_budget
                        )));
                    }
                    mesh_stats = Some((mesh.tet_count(), mesh.node_count()));
                    (Some(build_mesh(mesh)), None)
                }
            };

        // requested backends, defaulting to whatever the geometry offers
        let requested = self.backends.clone().unwrap_or_else(|| match &self.geometry {
            GeometryConfig::Layered { .. } => vec![BackendKind::Layered],
            _ => vec![BackendKind::Vie],
        });
        let mut backends = Vec::new();
        for kind in requested {
            let scene = match kind {
                BackendKind::Vie => vie_scene.clone().ok_or_else(|| {
                    ConfigError::Invalid("vie backend requested but geometry is layered".into())
                })?,
                BackendKind::Layered => layered_scene.clone().ok_or_else(|| {
                    ConfigError::Invalid(
                        "layered backend requested but geometry has no film analogue".into(),
                    )
                })?,
            };
            backends.push((kind, scene));
        }
        if backends.is_empty() {
            return Err(ConfigError::Invalid("no backends requested".into()));
        }

        // scan points
        if self.scan.count < 1 {
            return Err(ConfigError::Invalid("scan.count must be >= 1".into()));
        }
        let (a, b) = (lu.to_meters(self.scan.range[0]), lu.to_meters(self.scan.range[1]));
        if !(b > a) {
            return Err(ConfigError::Invalid("scan.range must be ascending".into()));
        }
        let base = self.scan.base.unwrap_or([0.0, 0.0]);
        let base = Vec3::new(lu.to_meters(base[0]), lu.to_meters(base[1]), 0.0);
        let values: Vec<f64> = if self.scan.count == 1 {
            vec![a]
        } else {
            (0..self.scan.count)
                .map(|k| a + (b - a) * k as f64 / (self.scan.count - 1) as f64)
                .collect()
        };
        let height = self.scan.height.map(|h| lu.to_meters(h));
        let scan = match self.scan.variable {
            ScanVariable::Height => {
                if a <= 0.0 {
                    return Err(ConfigError::Invalid("height scan must start above z = 0".into()));
                }
                ScanPoints {
                    variable: ScanVariable::Height,
                    primary: values.iter().map(|&z| base + Vec3::new(0.0, 0.0, z)).collect(),
                    secondary: None,
                    values,
                }
            }
            ScanVariable::Separation => {
                let h = height.ok_or_else(|| {
                    ConfigError::Invalid("separation scan requires scan.height".into())
                })?;
                if a <= 0.0 {
                    return Err(ConfigError::Invalid(
                        "separation scan range must be positive".into(),
                    ));
                }
                let anchor = base + Vec3::new(0.0, 0.0, h);
                ScanPoints {
                    variable: ScanVariable::Separation,
                    primary: vec![anchor; values.len()],
                    secondary: Some(
                        values.iter().map(|&d| anchor + Vec3::new(d, 0.0, 0.0)).collect(),
                    ),
                    values,
                }
            }
            ScanVariable::LineX => {
                let h = height.ok_or_else(|| {
                    ConfigError::Invalid("lineX scan requires scan.height".into())
                })?;
                ScanPoints {
                    variable: ScanVariable::LineX,
                    primary: values
                        .iter()
                        .map(|&x| Vec3::new(x, base.y, h))
                        .collect(),
                    secondary: None,
                    values,
                }
            }
        };

        // outputs and prerequisites
        if self.outputs.is_empty() {
            return Err(ConfigError::Invalid("outputs must not be empty".into()));
        }
        for out in &self.outputs {
            match out {
                OutputKind::CorrelationRatio if scan.secondary.is_none() => {
                    return Err(ConfigError::Invalid(
                        "correlationRatio output requires a separation scan".into(),
                    ));
                }
                OutputKind::Dephasing if self.dephasing.is_none() => {
                    return Err(ConfigError::Invalid(
                        "dephasing output requires the dephasing settings block".into(),
                    ));
                }
                OutputKind::Fidelity if self.fidelity.is_none() => {
                    return Err(ConfigError::Invalid(
                        "fidelity output requires the fidelity settings block (gate spec)".into(),
                    ));
                }
                _ => {}
            }
        }
        if self
            .fidelity
            .as_ref()
            .map(|f| f.include_dephasing && self.dephasing.is_none())
            .unwrap_or(false)
        {
            return Err(ConfigError::Invalid(
                "fidelity.includeDephasing requires the dephasing settings block".into(),
            ));
        }

        let axes = self
            .qubits
            .axes
            .iter()
            .map(|name| Ok((name.clone(), axis_vector(name)?)))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        if axes.is_empty() {
            return Err(ConfigError::Invalid("qubits.axes must not be empty".into()));
        }

        let cutoff = self
            .bath
            .dephasing_cutoff
            .map(|f| fu.to_rad_per_s(f))
            .unwrap_or(qem::bath::BathSpec::DEFAULT_CUTOFF);
        let bath = qem::bath::BathSpec::new(self.bath.temperature_k, cutoff)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        Ok(Scenario {
            config_echo: serde_json::to_value(self)?,
            backends,
            mesh_stats,
            qubit_omega,
            axes,
            transverse_moment: self.qubits.transverse_moment_bohr * qem::constants::MU_BOHR,
            longitudinal_moment: self.qubits.longitudinal_moment_bohr * qem::constants::MU_BOHR,
            bath,
            scan,
            outputs: self.outputs.clone(),
            dephasing: self.dephasing.as_ref().map(|d| DephasingSettings {
                points_per_decade: d.points_per_decade,
                decades: d.decades,
                time: tu.to_seconds(d.time),
            }),
            fidelity: self.fidelity.as_ref().map(|f| FidelitySettings {
                duration: tu.to_seconds(f.duration),
                steps: f.steps,
                include_dephasing: f.include_dephasing,
            }),
        })
    }
}
