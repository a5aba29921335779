from lifnet.learning.bal import BalParams, bal_select, train_bal
from lifnet.learning.information import mutual_information, spike_entropy
from lifnet.learning.model import TrainedModel, TrainReport, load_model, save_model
from lifnet.learning.sgl import SglParams, sgl_error, sgl_layer_updates, surrogate_derivative, train_sgl
from lifnet.learning.tempotron import (
    TempotronParams,
    psp_kernel,
    tempotron_potential,
    tempotron_t_max,
    tempotron_update,
    train_tempotron,
)
