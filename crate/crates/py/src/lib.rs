// SPDX-License-Identifier: Apache-2.0

//! Python bindings: netlists, simulation, golden models and campaigns.

use pesim_core::behavior::{self, PeVector};
use pesim_core::designs::DesignId;
use pesim_core::netlist::{parse_netlist, serialize_netlist, Netlist, ValidationRules};
use pesim_core::sim::{SimConfig, SimError, Simulator, Stimulus, Strength, Waveform};
use pesim_core::verify::{random_sequence, CampaignConfig, PairMode, Report, Verifier};
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sim_err(e: SimError) -> PyErr {
    match e {
        SimError::OscillationDetected { .. } => PyRuntimeError::new_err(e.to_string()),
        other => value_err(other),
    }
}

fn design(name: &str) -> PyResult<DesignId> {
    name.parse().map_err(value_err)
}

fn vector(bits: &str) -> PyResult<PeVector> {
    bits.parse().map_err(value_err)
}

#[pyclass(name = "Netlist", module = "pesim", frozen)]
struct PyNetlist {
    inner: Netlist,
}

#[pymethods]
impl PyNetlist {
    /// Parse netlist text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyNetlist {
            inner: parse_netlist(text).map_err(value_err)?,
        })
    }

    /// Build a named design: robust8, raceprone8, cshare8 or cascade<N>.
    #[staticmethod]
    fn design(name: &str) -> PyResult<Self> {
        Ok(PyNetlist {
            inner: design(name)?.build().map_err(value_err)?,
        })
    }

    fn to_text(&self) -> String {
        serialize_netlist(&self.inner)
    }

    /// `(nmos, pmos, total)`.
    fn device_count(&self) -> (usize, usize, usize) {
        let c = self.inner.device_count();
        (c.nmos, c.pmos, c.total)
    }

    #[pyo3(signature = (two_pulldown = false))]
    fn validate(&self, two_pulldown: bool) -> Vec<String> {
        let rules = if two_pulldown {
            ValidationRules::ROBUST_PE
        } else {
            ValidationRules::BASIC
        };
        self.inner
            .validate(rules)
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    #[getter]
    fn inputs(&self) -> Vec<String> {
        self.inner
            .inputs()
            .into_iter()
            .map(|i| self.inner.node_name(i).to_string())
            .collect()
    }

    #[getter]
    fn outputs(&self) -> Vec<String> {
        self.inner
            .outputs()
            .into_iter()
            .map(|i| self.inner.node_name(i).to_string())
            .collect()
    }

    /// Run the stimulus given in its text form.
    #[pyo3(signature = (stimulus, device_delay = 1))]
    fn simulate(&self, py: Python<'_>, stimulus: &str, device_delay: u64) -> PyResult<PyWaveform> {
        let stim = Stimulus::parse(stimulus).map_err(value_err)?;
        let config = SimConfig {
            device_delay,
            ..SimConfig::default()
        };
        let sim = Simulator::new(&self.inner, config).map_err(sim_err)?;
        let inner = py.detach(|| sim.run(&stim)).map_err(sim_err)?;
        Ok(PyWaveform { inner })
    }

    fn __repr__(&self) -> String {
        let c = self.inner.device_count();
        format!(
            "Netlist(nodes={}, devices={})",
            self.inner.nodes().len(),
            c.total
        )
    }
}

#[pyclass(name = "Waveform", module = "pesim", frozen)]
struct PyWaveform {
    inner: Waveform,
}

impl PyWaveform {
    fn node(&self, name: &str) -> PyResult<pesim_core::NodeId> {
        self.inner
            .node_table()
            .names
            .iter()
            .position(|n| n == name)
            .map(|i| pesim_core::NodeId(i as u32))
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))
    }
}

#[pymethods]
impl PyWaveform {
    #[getter]
    fn duration(&self) -> u64 {
        self.inner.duration()
    }

    /// `"0"`, `"1"` or `"x"`.
    fn logic_at(&self, node: &str, time: u64) -> PyResult<String> {
        Ok(self.inner.logic_at(self.node(node)?, time).as_char().to_string())
    }

    fn voltage_at(&self, node: &str, time: u64) -> PyResult<f64> {
        Ok(self.inner.state_at(self.node(node)?, time).voltage)
    }

    /// `(time, voltage, driven)` change records.
    fn changes(&self, node: &str) -> PyResult<Vec<(u64, f64, bool)>> {
        Ok(self
            .inner
            .changes(self.node(node)?)
            .iter()
            .map(|&(t, s)| (t, s.voltage, s.strength == Strength::Driven))
            .collect())
    }

    /// `(weighted, x_transitions)`.
    fn activity(&self) -> (f64, usize) {
        let a = self.inner.switching_activity();
        (a.weighted, a.x_transitions)
    }

    fn rail_short_count(&self) -> usize {
        self.inner.rail_shorts().len()
    }

    fn vcd(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner
            .write_vcd(&mut buf)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        String::from_utf8(buf).map_err(value_err)
    }
}

#[pyclass(name = "Report", module = "pesim", frozen)]
struct PyReport {
    inner: Report,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn campaign(&self) -> String {
        self.inner.campaign.clone()
    }

    #[getter]
    fn design(&self) -> String {
        self.inner.design.to_string()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    #[getter]
    fn total(&self) -> usize {
        self.inner.counts.total
    }

    #[getter]
    fn failed(&self) -> usize {
        self.inner.counts.failed
    }

    #[getter]
    fn flips(&self) -> usize {
        self.inner.counts.flips
    }

    #[getter]
    fn x(&self) -> usize {
        self.inner.counts.x
    }

    #[getter]
    fn one_hot_violations(&self) -> usize {
        self.inner.one_hot_violations
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[pyo3(signature = (max_failures = 20))]
    fn to_table(&self, max_failures: usize) -> String {
        self.inner.to_table(max_failures)
    }

    fn __repr__(&self) -> String {
        format!(
            "Report({} on {}: {}/{} passed)",
            self.inner.campaign, self.inner.design, self.inner.counts.passed, self.inner.counts.total
        )
    }
}

fn verifier(name: &str, seed: u64) -> PyResult<Verifier> {
    let cfg = CampaignConfig {
        seed,
        ..Default::default()
    };
    Verifier::new(design(name)?, cfg).map_err(value_err)
}

#[pyfunction]
fn pe_general(bits: &str) -> PyResult<String> {
    Ok(behavior::pe_general(&vector(bits)?).map_err(value_err)?.to_string())
}

/// `(op, la_inter, la_out)` of the 8-bit encoder.
#[pyfunction]
fn pe8(bits: &str, la: bool) -> PyResult<(String, bool, bool)> {
    let r = behavior::pe8(&vector(bits)?, la).map_err(value_err)?;
    Ok((r.op.to_string(), r.la_inter, r.la_out))
}

#[pyfunction]
#[pyo3(signature = (bits, la = false))]
fn cascade(bits: &str, la: bool) -> PyResult<String> {
    Ok(behavior::cascade_with_la(&vector(bits)?, la)
        .map_err(value_err)?
        .to_string())
}

#[pyfunction]
#[pyo3(signature = (design, random = None, seed = 1))]
fn exhaustive_equivalence(
    py: Python<'_>,
    design: &str,
    random: Option<usize>,
    seed: u64,
) -> PyResult<PyReport> {
    let v = verifier(design, seed)?;
    let inner = py
        .detach(|| match random {
            Some(n) => v.random_equivalence(n),
            None => v.exhaustive_equivalence(),
        })
        .map_err(value_err)?;
    Ok(PyReport { inner })
}

#[pyfunction]
fn race_sweep(py: Python<'_>, design: &str, offsets: Vec<u64>) -> PyResult<PyReport> {
    let v = verifier(design, 1)?;
    let inner = py.detach(|| v.race_sweep(&offsets)).map_err(value_err)?;
    Ok(PyReport { inner })
}

/// Exhaustive pairs when `pairs` is None, otherwise that many random pairs.
#[pyfunction]
#[pyo3(signature = (design, pairs = None, seed = 1))]
fn charge_share_scan(
    py: Python<'_>,
    design: &str,
    pairs: Option<usize>,
    seed: u64,
) -> PyResult<PyReport> {
    let v = verifier(design, seed)?;
    let mode = pairs.map_or(PairMode::Exhaustive, PairMode::Random);
    let inner = py.detach(|| v.charge_share_scan(mode)).map_err(value_err)?;
    Ok(PyReport { inner })
}

#[pyfunction]
#[pyo3(signature = (design, cycles = 1000, seed = 1))]
fn switching_audit(py: Python<'_>, design: &str, cycles: usize, seed: u64) -> PyResult<PyReport> {
    let v = verifier(design, seed)?;
    let seq = random_sequence(v.design().width(), cycles, seed);
    let inner = py.detach(|| v.switching_audit(&seq)).map_err(value_err)?;
    Ok(PyReport { inner })
}

#[pymodule]
fn pesim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetlist>()?;
    m.add_class::<PyWaveform>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(pe_general, m)?)?;
    m.add_function(wrap_pyfunction!(pe8, m)?)?;
    m.add_function(wrap_pyfunction!(cascade, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(race_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(charge_share_scan, m)?)?;
    m.add_function(wrap_pyfunction!(switching_audit, m)?)?;
    Ok(())
}
