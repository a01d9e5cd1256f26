//! JSON payloads shared by the command line and the Python bindings.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::colgen::{interim_guarantees, RefinementOutcome};
use crate::covers::CoverSummary;
use crate::error::Result;
use crate::exact::ExactNE;
use crate::game::{expected_payoffs, EquilibriumReport};
use crate::model::DetectionModel;
use crate::planner::PlanReport;
use crate::strategies::Rational;

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

pub fn ratio_string(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn covers_json(model: &DetectionModel, c: &CoverSummary) -> Value {
    json!({
        "n_star": c.n_star,
        "m_star": c.m_star,
        "cover": model.node_ids(&c.cover),
        "packing": model.component_ids(&c.packing),
        "status": c.status,
    })
}

pub fn plan_json(model: &DetectionModel, r: &PlanReport) -> Value {
    let c = &r.certificates;
    let mut v = Map::new();
    v.insert("alpha".into(), to_value(&r.alpha));
    v.insert("b2".into(), json!(r.b2));
    v.insert("b1".into(), json!(c.b1));
    v.insert("b1_lower".into(), json!(c.b1_lower));
    v.insert("gap".into(), json!(r.gap()));
    v.insert("epsilon".into(), json!(r.epsilon()));
    v.insert(
        "epsilon_exact".into(),
        json!(r.claims_valid.then(|| ratio_string(c.epsilon))),
    );
    v.insert("relative_loss_bound".into(), json!(r.relative_loss_bound()));
    v.insert(
        "relative_loss_bound_exact".into(),
        json!(r.claims_valid.then(|| ratio_string(c.relative_loss_bound))),
    );
    v.insert("guaranteed_rate".into(), json!(ratio_string(c.guaranteed_rate)));
    v.insert("cover_mode".into(), to_value(&r.cover_mode));
    v.insert("covers".into(), covers_json(model, &r.covers));
    v.insert("regime".into(), to_value(&r.regime));
    v.insert(
        "warnings".into(),
        Value::Array(
            r.warnings
                .iter()
                .map(|w| json!({ "code": w, "message": w.message() }))
                .collect(),
        ),
    );
    v.insert("sigma1".into(), to_value(&r.sigma1.to_file(model)));
    v.insert("sigma2".into(), to_value(&r.sigma2.to_file(model)));
    let refined = r.refined.as_ref().map(|p| {
        json!({
            "b1": p.b1,
            "rate": p.rate,
            "sigma1": p.sigma1.to_file(model),
            "sigma2": p.sigma2.as_ref().map(|s| s.to_file(model)),
            "steps": p.records.iter().map(|rec| json!({
                "b1": rec.b1,
                "rate": rec.rate,
                "iterations": rec.iterations,
                "epsilon_prime": rec.epsilon_prime,
                "loss_prime": rec.loss_prime,
            })).collect::<Vec<_>>(),
        })
    });
    v.insert("refined".into(), json!(refined));
    Value::Object(v)
}

pub fn refine_json(model: &DetectionModel, o: &RefinementOutcome) -> Value {
    let selected = o.selected();
    json!({
        "alpha": o.alpha,
        "b2": o.b2,
        "covers": covers_json(model, &o.covers),
        "b1": o.selected_b1,
        "rate": selected.map(|s| s.rate),
        "records": o.records.iter().map(|rec| json!({
            "b1": rec.b1,
            "rate": rec.rate,
            "iterations": rec.iterations,
            "support_size": rec.sigma1.len(),
            "epsilon_prime": rec.epsilon_prime,
            "loss_prime": rec.loss_prime,
        })).collect::<Vec<_>>(),
        "sigma1": selected.map(|s| s.sigma1.to_file(model)),
    })
}

pub fn trace_csv(o: &RefinementOutcome) -> String {
    let mut s = String::from("b1,iteration,z,epsilon_prime,loss_prime,support_size,columns,reduced_cost\n");
    for rec in &o.records {
        for it in &rec.history {
            let (eps, loss) = interim_guarantees(it.z, rec.b1, o.b2, o.covers.m_star);
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                rec.b1, it.iteration, it.z, eps, loss, it.support_size, it.columns, it.reduced_cost
            ));
        }
    }
    s
}

pub fn exact_json(model: &DetectionModel, ne: &ExactNE) -> Result<Value> {
    let (u1, u2) = expected_payoffs(model, &ne.sigma1, &ne.sigma2)?;
    Ok(json!({
        "b1": ne.params.b1,
        "b2": ne.params.b2,
        "value": ne.value,
        "rate": ne.rate,
        "u1": u1,
        "u2": u2,
        "formulation": ne.formulation,
        "lp_iterations": ne.lp_iterations,
        "sigma1": ne.sigma1.to_file(model),
        "sigma2": ne.sigma2.to_file(model),
    }))
}

pub fn eval_json(report: &EquilibriumReport, covers: &CoverSummary) -> Value {
    let mut v = to_value(report);
    v["n_star"] = json!(covers.n_star);
    v["m_star"] = json!(covers.m_star);
    v
}
