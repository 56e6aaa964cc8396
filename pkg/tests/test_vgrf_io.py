import logging

import numpy as np
import pytest

from gaitgen import make_recording, square_wave
from it2fnn.errors import EmptyDatasetError, EmptyRecordingError, ParseError, ValidationError
from it2fnn.vgrf_io import (
    Cohort,
    Dataset,
    VgrfRecording,
    load_dataset,
    load_labels,
    parse_recording,
    write_recording,
)


def row(t, total_left=612.0, total_right=598.3):
    sensors = [45.2] + [10.0] * 15
    return " ".join(str(v) for v in [t, *sensors, total_left, total_right])


def write_rows(path, rows):
    path.write_text("\n".join(rows) + "\n")
    return path


def test_column_mapping(tmp_path):
    path = write_rows(tmp_path / "GaPt03_01.txt", [row(0.0), row(0.01)])
    rec = parse_recording(path)
    assert len(rec) == 2
    assert rec.total_left_n[0] == 612.0
    assert rec.total_right_n[0] == 598.3
    assert rec.sensors_n[0, 0] == 45.2
    assert rec.sensors_n.shape == (2, 16)
    assert rec.dataset is Dataset.GA
    assert rec.cohort is Cohort.PATIENT
    assert rec.subject_id == "GaPt03"
    assert rec.sample_rate_hz == 100.0


def test_cohort_and_dataset_from_filename(tmp_path):
    rec = parse_recording(write_rows(tmp_path / "SiCo11_01.txt", [row(0.0), row(0.01)]))
    assert (rec.dataset, rec.cohort) == (Dataset.SI, Cohort.CONTROL)
    assert rec.cohort.label == -1


def test_short_row_is_parse_error_with_row_number(tmp_path):
    rows = [row(0.0), row(0.01), " ".join(row(0.02).split()[:18])]
    with pytest.raises(ParseError) as err:
        parse_recording(write_rows(tmp_path / "GaPt01_01.txt", rows))
    assert err.value.row == 3
    assert "row 3" in str(err.value)


def test_non_numeric_is_parse_error(tmp_path):
    rows = [row(0.0), row(0.01).replace("612.0", "abc")]
    with pytest.raises(ParseError) as err:
        parse_recording(write_rows(tmp_path / "GaPt01_01.txt", rows))
    assert err.value.row == 2


def test_empty_file(tmp_path):
    path = tmp_path / "GaPt01_01.txt"
    path.write_text("")
    with pytest.raises(EmptyRecordingError):
        parse_recording(path)


def test_negative_force_rejected(tmp_path):
    with pytest.raises(ValidationError, match="row 2"):
        parse_recording(write_rows(tmp_path / "GaPt01_01.txt", [row(0.0), row(0.01, total_left=-1.0)]))


def test_time_must_increase(tmp_path):
    with pytest.raises(ValidationError):
        parse_recording(write_rows(tmp_path / "GaPt01_01.txt", [row(0.0), row(0.01), row(0.01)]))


def test_sample_spacing_jitter(tmp_path):
    with pytest.raises(ValidationError, match="1%"):
        parse_recording(write_rows(tmp_path / "GaPt01_01.txt", [row(0.0), row(0.01), row(0.03)]))


def test_label_csv_overrides_filename(tmp_path):
    labels_path = tmp_path / "labels.csv"
    labels_path.write_text("subject_id,cohort,dataset\nGaPt03,Control,Ju\n")
    labels = load_labels(labels_path)
    rec = parse_recording(write_rows(tmp_path / "GaPt03_01.txt", [row(0.0), row(0.01)]), labels=labels)
    assert (rec.cohort, rec.dataset) == (Cohort.CONTROL, Dataset.JU)


def test_unrecognized_name_without_label(tmp_path):
    with pytest.raises(ValidationError, match="label"):
        parse_recording(write_rows(tmp_path / "walk1.txt", [row(0.0)]))


def test_round_trip_is_exact(tmp_path, rng):
    n = 300
    left = rng.uniform(0, 900, n)
    right = rng.uniform(0, 900, n)
    rec = make_recording(left, right)
    rec = VgrfRecording(
        rec.subject_id, rec.cohort, rec.dataset, np.round(np.arange(n) * 0.01, 2),
        rng.uniform(0, 150, (n, 16)), left, right,
    )
    path = tmp_path / "GaPt01_01.txt"
    write_recording(rec, path)
    again = parse_recording(path)
    for a, b in [(rec.time_s, again.time_s), (rec.sensors_n, again.sensors_n),
                 (rec.total_left_n, again.total_left_n), (rec.total_right_n, again.total_right_n)]:
        np.testing.assert_array_equal(a, b)
    path2 = tmp_path / "GaPt01_02.txt"
    write_recording(again, path2)
    assert path.read_text() == path2.read_text()


def _small_file(path):
    return write_rows(path, [row(round(i * 0.01, 2)) for i in range(5)])


def test_load_dataset_order_and_filter(tmp_path, caplog):
    for name in ["GaPt03_01.txt", "GaCo01_01.txt", "GaPt01_01.txt", "JuPt01_01.txt"]:
        _small_file(tmp_path / name)
    (tmp_path / "format.txt").write_text("not a recording\n")
    with caplog.at_level(logging.WARNING):
        recs = load_dataset(tmp_path, datasets={"Ga"})
    assert [r.name for r in recs] == ["GaCo01_01", "GaPt01_01", "GaPt03_01"]
    assert "format.txt" in caplog.text
    assert [r.name for r in load_dataset(tmp_path)] == [r.name for r in load_dataset(tmp_path)]


def test_load_dataset_empty_filter(tmp_path):
    for name in ["GaPt01_01.txt", "GaCo01_01.txt", "GaPt02_01.txt"]:
        _small_file(tmp_path / name)
    assert len(load_dataset(tmp_path, datasets={Dataset.GA})) == 3
    with pytest.raises(EmptyDatasetError):
        load_dataset(tmp_path, datasets={"Ju"})


def test_recording_invariants():
    f = square_wave([(0.6, 0.4)] * 3)
    rec = make_recording(f, f)
    with pytest.raises(ValidationError):
        VgrfRecording("x", Cohort.PATIENT, Dataset.GA, rec.time_s, rec.sensors_n, rec.total_left_n[:-1], rec.total_right_n)
    with pytest.raises(ValidationError):
        bad = rec.total_left_n.copy()
        bad[3] = np.nan
        VgrfRecording("x", Cohort.PATIENT, Dataset.GA, rec.time_s, rec.sensors_n, bad, rec.total_right_n)
