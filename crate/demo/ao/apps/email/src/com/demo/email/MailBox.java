package com.demo.email;

import java.util.List;

public class MailBox {
    private Transport transport;
    private Store store;

    public boolean send(String to, String body) {
        Message m = new Message(to, body);
        m.setHeader("X-Client", "demo-mail");
        store.saveDraft(m);
        return transport.deliver(m);
    }

    public void archive(long id, int folder) {
        Message m = store.find(id);
        store.move(m, folder);
        store.markRead(id, true);
    }

    public List<Message> fetch(int count, boolean unread) {
        List<Message> page = store.latest(count);
        if (unread) {
            page.removeIf(Message::isRead);
        }
        return page;
    }

    public int purge(int days) {
        long cutoff = System.currentTimeMillis() - days * 86400000L;
        int removed = store.deleteOlderThan(cutoff);
        transport.notifyPurged(removed);
        return removed;
    }

    public void flag(long id, boolean on) {
        Message m = store.find(id);
        m.setFlagged(on);
        store.update(m);
    }
}
