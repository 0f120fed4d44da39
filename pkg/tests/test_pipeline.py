import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from morphoforge.cli import main as cli_main
from morphoforge.network import Filament
from morphoforge.pipeline import (
    FILAMENTS_FILE,
    MANIFEST_FILE,
    NEIGHBORHOODS_FILE,
    NetworkStats,
    PipelineConfig,
    PipelineError,
    PipelineRun,
    StaleCheckpointError,
    compute_stats,
    export_filaments,
    load_analogies,
    load_filaments,
    load_neighborhoods,
    load_typed_edges,
    render_average,
    run_pipeline,
    write_analogies,
    write_neighborhoods,
    write_typed_edges,
)

TOY_KNOBS = dict(min_ngram=3, neighbors=100, w_threshold=3,
                 cc_threshold=0.66, min_subseries=3, max_iterations=50)


def toy_config(fixtures_dir, out_dir, **overrides):
    values = dict(TOY_KNOBS)
    values.update(overrides)
    return PipelineConfig(
        lexicon=str(fixtures_dir / "toy_lexicon.tsv"),
        output_dir=str(out_dir),
        **values,
    )


class TestConfig:
    def test_from_file_resolves_paths(self, fixtures_dir, tmp_path):
        config = PipelineConfig.from_file(fixtures_dir / "toy_config.toml")
        assert config.w_threshold == 3
        assert config.lexicon == str(fixtures_dir / "toy_lexicon.tsv")

    def test_overrides_win(self, fixtures_dir, tmp_path):
        config = PipelineConfig.from_file(
            fixtures_dir / "toy_config.toml",
            output_dir=str(tmp_path), w_threshold=5,
        )
        assert config.w_threshold == 5
        assert config.output_dir == str(tmp_path)

    def test_unknown_keys_rejected(self, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text('lexicon = "x"\noutput_dir = "y"\nmystery = 1\n')
        with pytest.raises(PipelineError, match="mystery"):
            PipelineConfig.from_file(bad)

    def test_threshold_validation(self, fixtures_dir, tmp_path):
        with pytest.raises(ValueError):
            toy_config(fixtures_dir, tmp_path, cc_threshold=1.5)
        with pytest.raises(ValueError):
            toy_config(fixtures_dir, tmp_path, w_threshold=0)

    def test_hash_ignores_output_dir(self, fixtures_dir, tmp_path):
        one = toy_config(fixtures_dir, tmp_path / "a")
        two = toy_config(fixtures_dir, tmp_path / "b")
        assert one.config_hash() == two.config_hash()
        assert one.config_hash() != toy_config(
            fixtures_dir, tmp_path, w_threshold=4
        ).config_hash()

    def test_cc_fraction_is_exact(self, fixtures_dir, tmp_path):
        config = toy_config(fixtures_dir, tmp_path)
        assert config.cc_fraction == Fraction(33, 50)


class TestCheckpointRoundTrips:
    def test_neighborhoods(self, tmp_path, toy_builder):
        path = tmp_path / NEIGHBORHOODS_FILE
        write_neighborhoods(path, toy_builder.neighborhoods_)
        assert load_neighborhoods(path) == toy_builder.neighborhoods_

    def test_analogies(self, tmp_path, toy_builder, toy_lexicon):
        path = tmp_path / "analogies.tsv"
        write_analogies(path, toy_builder.analogies_, lambda w: toy_lexicon[w].tag)
        assert (
            load_analogies(path).representatives
            == toy_builder.analogies_.representatives
        )

    def test_typed_edges(self, tmp_path, toy_builder):
        path = tmp_path / "network.tsv"
        write_typed_edges(path, toy_builder.network_)
        loaded = load_typed_edges(path)
        assert loaded.family_edges == toy_builder.network_.family_edges
        assert loaded.serial_edges == toy_builder.network_.serial_edges

    def test_filaments(self, tmp_path, toy_builder):
        path = tmp_path / FILAMENTS_FILE
        export_filaments(path, toy_builder.filaments_)
        loaded = load_filaments(path)
        assert loaded == [
            (f.entry, f.pivot, f.sub_series) for f in toy_builder.filaments_
        ]

    def test_empty_export(self, tmp_path):
        path = tmp_path / FILAMENTS_FILE
        export_filaments(path, [])
        assert path.read_text() == ""
        assert load_filaments(path) == []


class TestStats:
    def test_single_filament(self):
        stats = compute_stats(
            [Filament("gazouillarde", "gazouiller", tuple("abcdefg"))]
        )
        assert stats.entry_count == 1
        assert stats.serial_relation_count == 7
        assert stats.average_subseries == "7.00"

    def test_serial_count_identity(self, toy_builder):
        stats = compute_stats(toy_builder.filaments_)
        assert stats.serial_relation_count == sum(
            len(f.sub_series) for f in toy_builder.filaments_
        )

    def test_render_average_is_exact(self):
        assert render_average(1, 3) == "0.33"
        assert render_average(2, 3) == "0.67"
        assert render_average(144, 48) == "3.00"
        assert render_average(0, 0) == "0.00"

    def test_toy_stats_match_export_recount(self, fixtures_dir, tmp_path):
        config = toy_config(fixtures_dir, tmp_path)
        stats = run_pipeline(config)
        recount = load_filaments(tmp_path / FILAMENTS_FILE)
        assert stats.filament_count == len(recount)
        assert stats.entry_count == len({entry for entry, _, _ in recount})
        assert stats.serial_relation_count == sum(
            len(members) for _, _, members in recount
        )


class TestPipeline:
    def test_end_to_end_matches_golden(self, fixtures_dir, tmp_path):
        config = toy_config(fixtures_dir, tmp_path)
        run_pipeline(config)
        produced = (tmp_path / FILAMENTS_FILE).read_bytes()
        golden = (fixtures_dir / "toy_filaments.golden").read_bytes()
        assert produced == golden

    def test_rerun_is_byte_identical(self, fixtures_dir, tmp_path):
        config = toy_config(fixtures_dir, tmp_path)
        run_pipeline(config)
        first = {
            p.name: p.read_bytes() for p in tmp_path.iterdir() if p.is_file()
        }
        run_pipeline(config)
        second = {
            p.name: p.read_bytes() for p in tmp_path.iterdir() if p.is_file()
        }
        assert first == second

    def test_staged_equals_end_to_end(self, fixtures_dir, tmp_path):
        whole = tmp_path / "whole"
        staged = tmp_path / "staged"
        run_pipeline(toy_config(fixtures_dir, whole))
        runner = PipelineRun(toy_config(fixtures_dir, staged))
        runner.stage_neighbors()
        runner.stage_analogies()
        runner.stage_seed()
        runner.stage_bootstrap()
        runner.stage_export()
        runner.stage_stats()
        names = {p.name for p in whole.iterdir()} - {MANIFEST_FILE}
        assert names == {p.name for p in staged.iterdir()} - {MANIFEST_FILE}
        for name in names:
            assert (whole / name).read_bytes() == (staged / name).read_bytes()

    def test_later_stage_reads_checkpoints(self, fixtures_dir, tmp_path):
        config = toy_config(fixtures_dir, tmp_path)
        runner = PipelineRun(config)
        filaments = runner.stage_export()
        assert len(filaments) == 48
        assert (tmp_path / NEIGHBORHOODS_FILE).exists()

    def test_missing_lexicon_fails_at_lexicon_stage(self, tmp_path):
        config = PipelineConfig(
            lexicon=str(tmp_path / "absent.tsv"), output_dir=str(tmp_path)
        )
        with pytest.raises(PipelineError, match="lexicon"):
            run_pipeline(config)

    def test_empty_lexicon_fails(self, tmp_path):
        empty = tmp_path / "empty.tsv"
        empty.write_text("")
        config = PipelineConfig(lexicon=str(empty), output_dir=str(tmp_path / "out"))
        with pytest.raises(PipelineError, match="lexicon"):
            run_pipeline(config)

    def test_no_analogy_lexicon_exports_empty(self, tmp_path):
        lonely = tmp_path / "lonely.tsv"
        lonely.write_text(
            "un\tkkonssttan\tNcms\ndeux\taabbllee\tNcms\ntrois\tmmooddii\tV\n"
        )
        config = PipelineConfig(
            lexicon=str(lonely), output_dir=str(tmp_path / "out"),
            w_threshold=3, min_subseries=3,
        )
        stats = run_pipeline(config)
        assert stats.filament_count == 0
        assert (tmp_path / "out" / FILAMENTS_FILE).read_text() == ""

    def test_stale_checkpoint_refused_then_forced(self, fixtures_dir, tmp_path):
        run_pipeline(toy_config(fixtures_dir, tmp_path))
        changed = toy_config(fixtures_dir, tmp_path, w_threshold=4)
        with pytest.raises(StaleCheckpointError):
            PipelineRun(changed)
        PipelineRun(changed, force=True)

    def test_exported_gaz_record(self, fixtures_dir, tmp_path):
        config = PipelineConfig(
            lexicon=str(fixtures_dir / "gazouillarde.tsv"),
            output_dir=str(tmp_path),
            **TOY_KNOBS,
        )
        run_pipeline(config)
        lines = (tmp_path / FILAMENTS_FILE).read_text().splitlines()
        assert (
            "gazouillarde\tgazouiller\t"
            "citrouillarde douillarde grenouillarde rouillarde "
            "souillarde vadrouillarde vasouillarde"
        ) in lines


class TestBuilderEstimator:
    def test_get_params_round_trip(self):
        from morphoforge.builder import FilamentNetworkBuilder

        builder = FilamentNetworkBuilder(w_threshold=3, min_subseries=3)
        params = builder.get_params()
        assert params["w_threshold"] == 3
        assert params["cc_threshold"] == 0.66
        clone = FilamentNetworkBuilder(**params)
        assert clone.get_params() == params

    def test_unfitted_raises(self):
        from sklearn.exceptions import NotFittedError

        from morphoforge.builder import FilamentNetworkBuilder

        with pytest.raises(NotFittedError):
            FilamentNetworkBuilder().filaments()

    def test_invalid_threshold(self, toy_lexicon):
        from morphoforge.builder import FilamentNetworkBuilder

        with pytest.raises(ValueError):
            FilamentNetworkBuilder(cc_threshold=0.0).fit(toy_lexicon)

    def test_fit_matches_pipeline_export(self, fixtures_dir, tmp_path, toy_builder):
        run_pipeline(toy_config(fixtures_dir, tmp_path))
        exported = load_filaments(tmp_path / FILAMENTS_FILE)
        in_memory = [
            (f.entry, f.pivot, f.sub_series) for f in toy_builder.filaments_
        ]
        assert exported == in_memory

    def test_fit_without_analogies(self):
        from conftest import lexicon_from
        from morphoforge.builder import FilamentNetworkBuilder

        lexicon = lexicon_from(
            "un\tkkonssttan\tNcms\ndeux\taabbllee\tNcms\ntrois\tmmooddii\tV\n"
        )
        builder = FilamentNetworkBuilder().fit(lexicon)
        assert builder.filaments_ == []
        assert builder.network_ is None


class TestCli:
    def invoke(self, *args):
        return CliRunner().invoke(cli_main, list(args), catch_exceptions=False)

    def test_run_with_config(self, fixtures_dir, tmp_path):
        result = self.invoke(
            "run", "--config", str(fixtures_dir / "toy_config.toml"),
            "--out", str(tmp_path),
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["filament_count"] == 48
        assert payload["entry_count"] == 16

    def test_stage_commands_chain(self, fixtures_dir, tmp_path):
        base = [
            "--lexicon", str(fixtures_dir / "toy_lexicon.tsv"),
            "--out", str(tmp_path),
            "--w-threshold", "3", "--min-subseries", "3",
        ]
        for stage in ("neighbors", "analogies", "seed", "bootstrap", "export"):
            result = self.invoke(stage, *base)
            assert result.exit_code == 0, result.output
        produced = (tmp_path / FILAMENTS_FILE).read_bytes()
        golden = (fixtures_dir / "toy_filaments.golden").read_bytes()
        assert produced == golden

    def test_analogies_report_flag(self, fixtures_dir, tmp_path):
        report = tmp_path / "counters.json"
        result = self.invoke(
            "analogies",
            "--lexicon", str(fixtures_dir / "toy_lexicon.tsv"),
            "--out", str(tmp_path / "out"),
            "--report", str(report),
        )
        assert result.exit_code == 0, result.output
        counters = json.loads(report.read_text())
        assert counters["orthographic_pass"] == 296

    def test_missing_arguments_fail_cleanly(self):
        result = CliRunner().invoke(cli_main, ["run"])
        assert result.exit_code != 0
        assert "config" in result.output

    def test_nonzero_exit_on_stage_error(self, tmp_path):
        result = CliRunner().invoke(
            cli_main,
            ["seed", "--lexicon", str(tmp_path / "none.tsv"),
             "--out", str(tmp_path)],
        )
        assert result.exit_code != 0
