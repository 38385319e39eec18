import numpy as np
import pytest

from conftest import marker_embedding

from factpipe.classifier import TrainConfig, predict_many, train
from factpipe.encoder import (
    EncoderBackendRef,
    EncoderConnectionError,
    EncoderProtocolError,
    embed_remote,
)


def _backend(server, batch_limit=10, dims=None):
    return EncoderBackendRef(
        endpoint=server.endpoint,
        dims=dims if dims is not None else server.dims,
        timeout_ms=5_000,
        batch_limit=batch_limit,
    )


def test_vectors_match_mock_in_input_order(encoder_server):
    texts = ["alpha one", "beta two", "plain three"]
    got = embed_remote(texts, _backend(encoder_server))
    want = np.array([marker_embedding(t, encoder_server.dims) for t in texts])
    np.testing.assert_array_equal(got, want)


def test_batching_arithmetic(encoder_server):
    texts = [f"text {i}" for i in range(25)]
    embed_remote(texts, _backend(encoder_server, batch_limit=10))
    assert encoder_server.batch_sizes == [10, 10, 5]


def test_single_batch_when_under_limit(encoder_server):
    embed_remote(["a", "b"], _backend(encoder_server, batch_limit=10))
    assert encoder_server.batch_sizes == [2]


def test_wrong_dims_is_protocol_error(encoder_server):
    encoder_server.set_mode("wrong_dims")
    with pytest.raises(EncoderProtocolError, match="expected 8, got 11"):
        embed_remote(["a"], _backend(encoder_server))


def test_error_status_is_protocol_error(encoder_server):
    encoder_server.set_mode("error")
    with pytest.raises(EncoderProtocolError, match="503"):
        embed_remote(["a"], _backend(encoder_server))


def test_unreachable_endpoint_is_retriable():
    backend = EncoderBackendRef(
        endpoint="http://127.0.0.1:9/encode", dims=4, timeout_ms=300, batch_limit=4
    )
    with pytest.raises(EncoderConnectionError):
        embed_remote(["a"], backend)


def test_empty_input_rejected(encoder_server):
    with pytest.raises(ValueError):
        embed_remote([], _backend(encoder_server))


def test_head_trains_on_mock_embeddings(encoder_server):
    # alpha/beta marker words make the mock embeddings linearly separable.
    texts = [f"alpha sample {i}" for i in range(20)] + [
        f"beta sample {i}" for i in range(20)
    ]
    labels = [0] * 20 + [1] * 20
    vectors = embed_remote(texts, _backend(encoder_server))
    params, _ = train(
        vectors,
        labels,
        ("alpha", "beta"),
        TrainConfig(epochs=100, batch_size=8, learning_rate=0.5, seed=3, patience=100),
        feature_space="encoder:dims=8",
    )
    held_out = embed_remote(["alpha held out", "beta held out"], _backend(encoder_server))
    ids, _ = predict_many(params, held_out)
    assert ids.tolist() == [0, 1]
