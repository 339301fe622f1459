use quantum_gas::protocol::{self, parse, run_source, ProtocolError, BUNDLED};

#[test]
fn bundled_scenarios_meet_their_expectations() {
    for (name, src) in BUNDLED {
        let report = run_source(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!report.expectations.is_empty(), "{name} has no expectations");
        for e in &report.expectations {
            assert!(e.passed, "{name} line {}: {} ({})", e.line, e.statement, e.detail);
        }
    }
}

#[test]
fn bundled_scenarios_render_and_reparse() {
    for (name, src) in BUNDLED {
        let p = parse(src).unwrap();
        let again = parse(&p.to_string()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(p, again, "{name}");
    }
}

#[test]
fn example_heats() {
    let r = run_source(protocol::bundled("example1_distinguishable").unwrap()).unwrap();
    assert!((r.observer("truth").unwrap().total_q + 2f64.ln()).abs() < 1e-12);

    let r = run_source(protocol::bundled("example2_nondistinguishable").unwrap()).unwrap();
    let q = r.observer("truth").unwrap().total_q;
    let lp = (2.0 + 2f64.sqrt()) / 4.0;
    let lm = (2.0 - 2f64.sqrt()) / 4.0;
    assert!((q - (lp * lp.ln() + lm * lm.ln())).abs() < 1e-12);
}

#[test]
fn json_report_shape() {
    let r = run_source(protocol::bundled("peres_tatiana").unwrap()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["schema"], "1");
    assert_eq!(v["units"], "NkT");
    let obs = v["observers"].as_array().unwrap();
    assert_eq!(obs.len(), 2);
    let tatiana = &obs[0];
    assert_eq!(tatiana["name"], "tatiana");
    assert_eq!(tatiana["verdict"]["second_law"], "violated");
    assert_eq!(tatiana["verdict"]["apparent_violation_explained"], false);
    assert_eq!(obs[1]["verdict"]["apparent_violation_explained"], true);
    let step = &tatiana["steps"][1];
    assert!(step["Q"].is_number());
    assert_eq!(
        step["chambers"][0]["contents_digest"]["hash"].as_str().unwrap().len(),
        64
    );
}

#[test]
fn absolute_units_scale_heats() {
    let p = parse(protocol::bundled("example1_distinguishable").unwrap()).unwrap();
    let units = protocol::Units::Absolute {
        kb: 2.0,
        particles: 3.0,
        temperature: 5.0,
    };
    let r = protocol::execute_with_units(&p, units).unwrap();
    assert!((r.observers[0].total_q + 30.0 * 2f64.ln()).abs() < 1e-12);
    assert_eq!(r.units, "absolute");
}

#[test]
fn errors_carry_line_numbers() {
    let e = parse("DIM 2\nSTATE a ket(1, 0\n").unwrap_err();
    assert!(matches!(e, ProtocolError::SyntaxError { line: 2, .. }), "{e:?}");

    let e = parse("DIM 2\nSTATE a ket(1, 0)\nSTATE a ket(0, 1)\n").unwrap_err();
    assert_eq!(
        e,
        ProtocolError::DuplicateName {
            line: 3,
            name: "a".into()
        }
    );

    let e = parse("DIM 2\nCHAMBER c 1 b\n").unwrap_err();
    assert_eq!(
        e,
        ProtocolError::UndefinedName {
            line: 2,
            name: "b".into()
        }
    );

    let e = parse("STATE a ket(1, 0)\n").unwrap_err();
    assert!(matches!(e, ProtocolError::HeaderMissing { line: 1 }));

    // dimension mismatch only shows up when the script runs
    let e = run_source("DIM 2\nSTATE a ket(1, 0, 0)\nCHAMBER c 1 a\n").unwrap_err();
    assert!(matches!(e, ProtocolError::Runtime { line: 3, .. }), "{e:?}");

    let e = run_source("DIM 2\nSTATE a ket(1, 0)\nCHAMBER c 1 a\nROTATE c 2*proj(a)\n").unwrap_err();
    assert_eq!(e.line(), 4);
}

#[test]
fn failing_expectation_is_reported_not_raised() {
    let src = "DIM 2\nSTATE a ket(1, 0)\nCHAMBER c 1 a\nEXPECT chambers 3\n";
    let r = run_source(src).unwrap();
    assert!(!r.all_expectations_passed());
    assert_eq!(r.expectations[0].line, 4);
}
