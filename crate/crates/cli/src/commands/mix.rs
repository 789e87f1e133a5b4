//! `mix`: build a noisy corpus at a controlled per-group SNR setting.

use noiseparity::{build_noisy_corpus, load_manifest, read_wav, Group, MixOptions};

use crate::config::RunConfig;
use crate::{AppError, AppResult, MixArgs};

pub fn run(cfg: &RunConfig, args: &MixArgs) -> AppResult<()> {
    let setting = args
        .setting
        .or(cfg.setting)
        .ok_or_else(|| AppError::usage("no SNR setting given (use --setting or the config file)"))?;
    let entries = load_manifest(&args.manifest)?;
    if entries.is_empty() {
        return Err(AppError::runtime(format!(
            "manifest {} lists no utterances",
            args.manifest.display()
        )));
    }
    // Both noise sources are loaded before anything is written, so a
    // missing file fails the run with zero outputs on disk.
    let noise_healthy = read_wav(&args.noise_healthy)?;
    let noise_pathological = read_wav(&args.noise_pathological)?;

    let opts = MixOptions {
        bit_depth: args.bit_depth.unwrap_or(cfg.bit_depth),
        keep_components: args.keep_components || cfg.keep_components,
    };
    let mixed = build_noisy_corpus(
        &entries,
        &noise_healthy,
        &noise_pathological,
        setting,
        &args.out_dir,
        cfg.seed,
        &opts,
    )?;

    for group in [Group::Healthy, Group::Pathological] {
        let achieved: Vec<f64> = mixed
            .iter()
            .filter(|m| m.entry.group == group)
            .map(|m| m.achieved_snr_db)
            .collect();
        if achieved.is_empty() {
            continue;
        }
        let mean = achieved.iter().sum::<f64>() / achieved.len() as f64;
        println!(
            "group={} files={} target_snr_db={:.1} mean_achieved_snr_db={:.1}",
            group.as_str(),
            achieved.len(),
            setting.target_for(group),
            mean,
        );
    }
    let clipped: usize = mixed.iter().map(|m| m.clipped_samples).sum();
    if clipped > 0 {
        log::warn!("cmd=mix event=clipping clipped_samples={clipped}");
    }
    log::info!(
        "cmd=mix setting={} files={} out_dir={}",
        setting,
        mixed.len(),
        args.out_dir.display(),
    );
    Ok(())
}
