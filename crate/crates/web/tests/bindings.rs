use hardylab_web::{necessity, sharpness, t3iii};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn t3iii_report_passes_its_gate() {
    for n in [2, 3] {
        let v = parse(&t3iii(n, 7).unwrap());
        assert_eq!(v["gate"]["status"], "pass");
        let ratio = v["outcome"]["ratio"].as_f64().unwrap();
        // ratio is already relative to the constant
        assert!(ratio > 0.0 && ratio <= 1.02, "{ratio}");
    }
}

#[test]
fn t3iii_rejects_other_dimensions() {
    assert!(t3iii(4, 0).is_err());
}

#[test]
fn sharpness_values_increase() {
    let v = parse(&sharpness(vec![0.8, 0.4, 0.2], 64).unwrap());
    let vals: Vec<f64> = v["outcome"]["arms"][0]["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(vals.len(), 3);
    assert!(vals.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn necessity_needs_three_widths() {
    assert!(necessity(vec![0.4, 0.2], 1.0, 1.0).is_err());
    let v = parse(&necessity(vec![0.4, 0.2, 0.1], 1.0, 1.0).unwrap());
    assert_eq!(v["outcome"]["kind"], "trend");
}
