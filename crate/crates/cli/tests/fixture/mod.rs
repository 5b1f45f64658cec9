//! Small synthetic multitrack datasets written to disk.

#![allow(dead_code)]

use std::fs;
use std::path::Path;

use irmsep::dataset::write_wav;
use irmsep::synth::{self, Partial};
use irmsep::AudioClip;

pub const INSTRUMENTS: [&str; 3] = ["bass", "drums", "vocals"];
pub const SR: u32 = 44_100;

fn stem(instrument: &str, song: u64, len: usize) -> AudioClip {
    // Independent hiss per channel keeps the stereo channels from being collinear.
    let hiss =
        synth::white_noise(2, len, SR, 500 + song * 8 + instrument.len() as u64).scaled(0.05);
    tonal(instrument, song, len).try_add(&hiss).unwrap()
}

fn tonal(instrument: &str, song: u64, len: usize) -> AudioClip {
    let root = 55.0 * (1.0 + song as f64 * 0.25);
    match instrument {
        "bass" => synth::sine_clip(
            &[
                Partial::new(root, 0.3, 0.0),
                Partial::new(2.0 * root, 0.1, 0.5),
            ],
            2,
            len,
            SR,
        ),
        "drums" => {
            // Decaying noise bursts four times a second.
            let noise = synth::white_noise(2, len, SR, 100 + song);
            let period = SR as usize / 4;
            let channels = noise
                .channels()
                .iter()
                .map(|ch| {
                    ch.iter()
                        .enumerate()
                        .map(|(n, x)| x * 2.0 * (-((n % period) as f64) / 2000.0).exp())
                        .collect()
                })
                .collect();
            AudioClip::new(channels, SR).unwrap()
        }
        _ => synth::sine_clip(
            &[
                Partial::new(8.0 * root, 0.15, 1.0),
                Partial::new(12.0 * root, 0.08, 2.0),
                Partial::new(20.0 * root, 0.04, 0.3),
            ],
            2,
            len,
            SR,
        ),
    }
}

/// `songs` songs of `seconds` seconds under `root`, plus `manifest.txt`
/// splitting them train/test by `train` count.
pub fn write_dataset(root: &Path, songs: usize, seconds: f64, train: usize) {
    let len = (seconds * SR as f64) as usize;
    let mut manifest = format!("# instruments: {}\n", INSTRUMENTS.join(","));
    for k in 0..songs {
        let id = format!("song-{k:02}");
        let dir = root.join(&id);
        fs::create_dir_all(&dir).unwrap();
        for inst in INSTRUMENTS {
            write_wav(&dir.join(format!("{inst}.wav")), &stem(inst, k as u64, len)).unwrap();
        }
        let split = if k < train { "train" } else { "test" };
        manifest.push_str(&format!("{id}\t{split}\n"));
    }
    fs::write(root.join("manifest.txt"), manifest).unwrap();
}

/// Manifest with `train` training and `test` test songs and no audio.
pub fn write_manifest_only(path: &Path, train: usize, test: usize) {
    let mut text = format!("# instruments: {}\n", INSTRUMENTS.join(","));
    for k in 0..train + test {
        let split = if k < train { "train" } else { "test" };
        text.push_str(&format!("s{k:03}\t{split}\n"));
    }
    fs::write(path, text).unwrap();
}

/// Every file under `dir`, sorted, with its bytes.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}
