"""Transformers-backed model roles for real checkpoints (GPT-2 style causal
LM, RoBERTa-style masked LM, a sentence-transformers encoder, and a
seq2seq paraphraser decoded greedily).

Requires the 'hf' extra. Import and loading failures surface as RuntimeError
so startup can exit with a diagnostic; nothing here is touched when every
role is configured as "lite".
"""
from __future__ import annotations

import numpy as np


def _require(module: str):
    try:
        return __import__(module)
    except ImportError as exc:
        raise RuntimeError(
            f"role requires the '{module}' package (install the hf extra)"
        ) from exc


class HfCausalLM:
    """Per-word log-probabilities from a causal LM; word scores sum their
    subword pieces, and the first word gets its unconditional score."""

    def __init__(self, model_id: str, device: str = "cpu"):
        torch = _require("torch")
        transformers = _require("transformers")
        self._torch = torch
        self.tokenizer = transformers.AutoTokenizer.from_pretrained(model_id)
        self.model = transformers.AutoModelForCausalLM.from_pretrained(model_id)
        self.model.to(device)
        self.model.eval()
        self.device = device

    def logprobs(self, tokens: list[str]) -> list[float]:
        torch = self._torch
        text = " ".join(tokens)
        enc = self.tokenizer(text, return_tensors="pt").to(self.device)
        ids = enc["input_ids"][0]
        with torch.no_grad():
            logits = self.model(**enc).logits[0]
        logsoft = torch.log_softmax(logits, dim=-1)
        piece_scores = [float(logsoft[i - 1, ids[i]]) for i in range(1, len(ids))]
        # first piece: unconditional unigram estimate from the final softmax
        first = float(torch.log_softmax(logits.mean(dim=0), dim=-1)[ids[0]])
        piece_scores.insert(0, first)
        # map pieces back onto whitespace words by running offsets
        word_scores = [0.0] * len(tokens)
        offsets = self.tokenizer(text, return_offsets_mapping=True)["offset_mapping"]
        starts = []
        cursor = 0
        for tok in tokens:
            starts.append(cursor)
            cursor += len(tok) + 1
        for (piece_start, _), score in zip(offsets, piece_scores):
            word_index = max(i for i, s in enumerate(starts) if s <= piece_start)
            word_scores[word_index] += score
        return [min(s, 0.0) for s in word_scores]

    def mask_fill(self, tokens: list[str], mask_index: int, top_k: int):
        raise RuntimeError("causal checkpoints do not serve mask_fill; configure mask_model")


class HfMaskFiller:
    def __init__(self, model_id: str, device: str = "cpu"):
        transformers = _require("transformers")
        self.pipe = transformers.pipeline(
            "fill-mask", model=model_id, device=-1 if device == "cpu" else 0
        )
        self.mask_token = self.pipe.tokenizer.mask_token

    def mask_fill(self, tokens: list[str], mask_index: int, top_k: int):
        words = list(tokens)
        words.insert(mask_index, self.mask_token)
        results = self.pipe(" ".join(words), top_k=top_k)
        out = [(r["token_str"].strip(), float(r["score"])) for r in results]
        return sorted(out, key=lambda ws: -ws[1])


class HfEmbedder:
    token_dim = 768
    sentence_dim = 384

    def __init__(self, model_id: str, device: str = "cpu"):
        transformers = _require("transformers")
        st = _require("sentence_transformers")
        self.tokenizer = transformers.AutoTokenizer.from_pretrained(model_id)
        self.model = transformers.AutoModel.from_pretrained(model_id).to(device)
        self.model.eval()
        self.sentence_model = st.SentenceTransformer("all-MiniLM-L6-v2", device=device)
        self.device = device
        self.token_dim = int(self.model.config.hidden_size)
        self.sentence_dim = int(self.sentence_model.get_sentence_embedding_dimension())

    def token_vectors(self, tokens: list[str]) -> np.ndarray:
        torch = _require("torch")
        enc = self.tokenizer(
            tokens, is_split_into_words=True, return_tensors="pt", truncation=True
        ).to(self.device)
        with torch.no_grad():
            hidden = self.model(**enc).last_hidden_state[0]
        word_ids = enc.word_ids(0)
        sums = np.zeros((len(tokens), self.token_dim))
        counts = np.zeros(len(tokens))
        for piece, wid in enumerate(word_ids):
            if wid is not None:
                sums[wid] += hidden[piece].cpu().numpy()
                counts[wid] += 1
        counts[counts == 0] = 1
        return sums / counts[:, None]

    def sentence_vector(self, text: str) -> np.ndarray:
        return np.asarray(self.sentence_model.encode(text))


class HfParaphraser:
    """Greedy decoding keeps the output deterministic for fixed weights."""

    def __init__(self, model_id: str, device: str = "cpu"):
        transformers = _require("transformers")
        self.tokenizer = transformers.AutoTokenizer.from_pretrained(model_id)
        self.model = transformers.AutoModelForSeq2SeqLM.from_pretrained(model_id).to(device)
        self.model.eval()
        self.device = device

    def rewrite(self, text: str) -> str:
        torch = _require("torch")
        enc = self.tokenizer(text, return_tensors="pt", truncation=True).to(self.device)
        with torch.no_grad():
            out = self.model.generate(
                **enc, num_beams=1, do_sample=False, max_new_tokens=256
            )
        decoded = self.tokenizer.decode(out[0], skip_special_tokens=True)
        return decoded if decoded.strip() else text
