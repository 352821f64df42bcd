//! Flat SVG pictures of joint spectra.

use std::fmt::Write;

use cliffspec::spectrum::JointSpectrum;
use cliffspec::Complex64;

use crate::meta::Meta;

/// Points closer than this share a site in the picture.
pub const SITE_TOL: f64 = 1e-6;

const PANEL: f64 = 360.0;
const RADIUS: f64 = 150.0;

#[derive(Clone, Copy, Debug)]
pub enum RenderMode<'a> {
    /// One dot per distinct eigenvalue.
    Classical,
    /// `h` concentric rings at a site whose stack has height `h`.
    Jet,
    /// Source spectrum and its image side by side, both in jet style.
    MappedPair(&'a JointSpectrum),
}

fn to_screen(z: Complex64, x0: f64) -> (f64, f64) {
    (x0 + PANEL / 2.0 + RADIUS * z.re, PANEL / 2.0 - RADIUS * z.im)
}

fn panel(out: &mut String, s: &JointSpectrum, x0: f64, jet: bool, title: Option<&str>) {
    let (cx, cy) = to_screen(Complex64::new(0.0, 0.0), x0);
    let _ = writeln!(
        out,
        r#"<circle class="disk" cx="{cx:.3}" cy="{cy:.3}" r="{RADIUS:.3}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    if let Some(t) = title {
        let _ = writeln!(out, r#"<text x="{:.3}" y="20" text-anchor="middle" font-size="14">{t}</text>"#, cx);
    }
    let sites = if jet { s.stack_heights(SITE_TOL) } else { s.classical(SITE_TOL) };
    for (u, h) in sites {
        let (x, y) = to_screen(u, x0);
        if jet {
            for j in 0..h {
                let r = 3.0 + 3.0 * j as f64;
                let _ = writeln!(
                    out,
                    r#"<circle class="marker" cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="none" stroke="navy" stroke-width="1.2"/>"#
                );
            }
            let _ = writeln!(
                out,
                r#"<text class="height" x="{:.3}" y="{:.3}" font-size="11">{h}</text>"#,
                x + 6.0 + 3.0 * h as f64,
                y - 4.0
            );
        } else {
            let _ = writeln!(out, r#"<circle class="marker" cx="{x:.3}" cy="{y:.3}" r="4.000" fill="navy"/>"#);
        }
    }
}

/// Deterministic SVG text for `s`.
pub fn render_spectrum(s: &JointSpectrum, mode: RenderMode<'_>, meta: Option<&Meta>) -> String {
    let width = match mode {
        RenderMode::MappedPair(_) => 2.0 * PANEL,
        _ => PANEL,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{PANEL:.0}" viewBox="0 0 {width:.0} {PANEL:.0}">"#
    );
    if let Some(m) = meta {
        let _ = writeln!(out, "<!-- {} -->", m.line());
    }
    match mode {
        RenderMode::Classical => panel(&mut out, s, 0.0, false, None),
        RenderMode::Jet => panel(&mut out, s, 0.0, true, None),
        RenderMode::MappedPair(image) => {
            panel(&mut out, s, 0.0, true, Some("source"));
            panel(&mut out, image, PANEL, true, Some("image"));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Points of `s` outside the closed unit disk.
pub fn outside_disk(s: &JointSpectrum) -> usize {
    s.points.iter().filter(|p| p.u.norm() > 1.0 + 1e-12).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use cliffspec::spectrum::{fig1_matrix, joint_spectrum, joint_spectrum_of_matrix, pauli_pair};

    fn count(svg: &str, class: &str) -> usize {
        svg.matches(&format!("class=\"{class}\"")).count()
    }

    #[test]
    fn empty_spectrum_is_the_circle() {
        let svg = render_spectrum(&JointSpectrum::default(), RenderMode::Jet, None);
        assert_eq!(count(&svg, "disk"), 1);
        assert_eq!(count(&svg, "marker"), 0);
    }

    #[test]
    fn pauli_is_a_stack_of_two() {
        let s = joint_spectrum(&pauli_pair(), &Default::default()).unwrap();
        let svg = render_spectrum(&s, RenderMode::Jet, None);
        assert_eq!(count(&svg, "marker"), 2);
        assert!(svg.contains(r#"cx="180.000" cy="180.000" r="6.000""#));
        assert_eq!(count(&render_spectrum(&s, RenderMode::Classical, None), "marker"), 1);
    }

    #[test]
    fn example_heights_and_determinism() {
        let s = joint_spectrum_of_matrix(&fig1_matrix(), &Default::default()).unwrap();
        let svg = render_spectrum(&s, RenderMode::Jet, None);
        assert_eq!(count(&svg, "marker"), 10);
        let mut heights: Vec<String> = svg
            .lines()
            .filter(|l| l.contains("class=\"height\""))
            .map(|l| l[l.find('>').unwrap() + 1..l.find("</").unwrap()].to_string())
            .collect();
        heights.sort();
        assert_eq!(heights, ["1", "2", "3", "4"]);
        assert_eq!(svg, render_spectrum(&s, RenderMode::Jet, None));
        let pair = render_spectrum(&s, RenderMode::MappedPair(&s), None);
        assert_eq!(count(&pair, "disk"), 2);
        assert_eq!(outside_disk(&s), 0);
    }
}
