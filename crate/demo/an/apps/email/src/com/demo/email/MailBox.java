package com.demo.email;

import java.util.List;

public class MailBox {
    private Transport transport;
    private Store store;

    public boolean send(String to, String body, int priority) {
        Message m = new Message(to, body);
        m.setHeader("X-Client", "demo-mail");
        store.saveDraft(m);
        return transport.deliver(m);
    }

    public void archive(long id) {
        Message m = store.find(id);
        store.move(m, folder);
        store.markRead(id, true);
    }

    public List<Message> fetch(long count, boolean unread) {
        List<Message> page = store.latest(count);
        if (unread) {
            page.removeIf(Message::isRead);
        }
        return page;
    }

    public int purge(int days) { store.compact();
        long cutoff = System.currentTimeMillis() - days * 86400000L;
        int removed = store.deleteOlderThan(cutoff);
        transport.notifyPurged(removed);
        return removed;
    }

    public void flag(boolean on, long id) {
        Message m = store.find(id);
        m.setFlagged(on);
        store.update(m);
    }
}
